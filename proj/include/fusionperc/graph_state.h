// Copyright 2026 The fusionperc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FUSIONPERC_GRAPH_STATE_H_
#define FUSIONPERC_GRAPH_STATE_H_

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fusionperc/clifford.h"

namespace fusionperc {

using VertexId = int;

/// How the failure measurement of a Type-II fusion is expressed.
///
/// kRotated: the axes refer to the photons themselves, i.e. they are
/// conjugated through each vertex's local-Clifford tag before the graph
/// rewrite is applied. A 3-GHZ leaf carries a Hadamard tag, so a rotated
/// X failure on a leaf deletes it while an X failure on the GHZ center
/// bonds its two leaves.
///
/// kStandard: the axes refer to the graph frame at the time the gate fires.
enum class FusionMode { kStandard, kRotated };

struct FusionBasis {
  FusionMode mode = FusionMode::kRotated;
  Pauli first = Pauli::kX;
  Pauli second = Pauli::kX;

  /// Default for the two fusions that build a microcluster.
  static FusionBasis Rotated() { return {FusionMode::kRotated, Pauli::kX, Pauli::kX}; }
  /// Default for fusions between neighboring sites.
  static FusionBasis Standard() { return {FusionMode::kStandard, Pauli::kZ, Pauli::kZ}; }

  friend bool operator==(const FusionBasis&, const FusionBasis&) = default;
};

enum class FusionOutcome { kSuccess, kFailure };

/// Undirected simple graph with a local-Clifford tag per vertex. The
/// physical state is (prod_v tag_v) |G>, up to Pauli byproducts of
/// measurements, which are not tracked.
class GraphState {
 public:
  GraphState() = default;

  /// Star graph on `n` qubits (center `first_id`, leaves following ids),
  /// with Hadamard tags on the leaves so that the physical state is the
  /// n-qubit GHZ state.
  static GraphState Ghz(int n, VertexId first_id = 0);

  void AddVertex(VertexId v, Clifford tag = {});
  void AddEdge(VertexId a, VertexId b);
  void ToggleEdge(VertexId a, VertexId b);
  void RemoveVertex(VertexId v);

  bool Contains(VertexId v) const { return adj_.count(v) != 0; }
  bool HasEdge(VertexId a, VertexId b) const;
  const std::set<VertexId>& Neighbors(VertexId v) const;
  int Degree(VertexId v) const { return static_cast<int>(Neighbors(v).size()); }
  std::size_t VertexCount() const { return adj_.size(); }
  std::size_t EdgeCount() const;
  std::vector<VertexId> Vertices() const;
  std::vector<std::pair<VertexId, VertexId>> Edges() const;

  const Clifford& Tag(VertexId v) const;
  void SetTag(VertexId v, Clifford tag);

  /// Disjoint union; vertex ids must not collide.
  void Merge(const GraphState& other);

  /// Complements the edge set inside N(v) and updates tags so the physical
  /// state is unchanged.
  void LocalComplement(VertexId v);

  /// Graph-frame Pauli measurement of `v`; `v` is removed.
  ///   Z: delete v.
  ///   Y: local complement at v, delete v.
  ///   X: with b0 the lowest-id neighbor, LC(b0), LC(v), delete v, LC(b0).
  void MeasurePauli(VertexId v, Pauli axis);

  /// Measures the photon-frame observable `axis` on v.
  void MeasurePhoton(VertexId v, Pauli axis);

  /// Graph-frame axis equal to the photon-frame `axis` at v.
  Pauli GraphAxis(VertexId v, Pauli axis) const;

  /// Photon-frame failure axes of a fusion on (v1, v2) in `basis`.
  std::pair<Pauli, Pauli> FailureAxes(VertexId v1, VertexId v2,
                                      const FusionBasis& basis) const;

  /// Type-II fusion. Success removes v1, v2 and toggles every edge of
  /// N(v1) x N(v2). Failure measures both qubits in the failure basis.
  /// Throws if v1 == v2, either is absent, or they are adjacent.
  void Fuse(VertexId v1, VertexId v2, FusionOutcome outcome,
            const FusionBasis& basis);

  /// Loss remedy: Z-measures every current neighbor of v, then drops v.
  void CutOut(VertexId v);

  std::set<VertexId> ConnectedComponent(VertexId v) const;
  std::vector<std::set<VertexId>> Components() const;

  /// Line format: "v <id>", "e <id> <id>", "lc <id> <tag>".
  std::string ToText() const;
  static GraphState FromText(std::string_view text);

  friend bool operator==(const GraphState&, const GraphState&) = default;

 private:
  void Require(VertexId v) const;

  std::map<VertexId, std::set<VertexId>> adj_;
  std::map<VertexId, Clifford> tags_;
};

}  // namespace fusionperc

#endif  // FUSIONPERC_GRAPH_STATE_H_
