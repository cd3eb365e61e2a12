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

#ifndef FUSIONPERC_ORACLE_CHECK_H_
#define FUSIONPERC_ORACLE_CHECK_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fusionperc/graph_state.h"
#include "fusionperc/lattice.h"
#include "fusionperc/tableau.h"

namespace fusionperc {

/// A graph-state fragment evolved twice in lockstep: by the rewrite rules
/// and by a stabilizer tableau of the physical (photon-frame) state.
/// Graph-frame operations are translated to tableau measurements through the
/// rewrite engine's current local-Clifford tags.
class DualFragment {
 public:
  explicit DualFragment(const GraphState& initial);

  const GraphState& graph() const { return graph_; }
  const StabilizerTableau& tableau() const { return tableau_; }
  bool Contains(VertexId v) const { return graph_.Contains(v); }

  void MeasureGraphFrame(VertexId v, Pauli axis);
  void MeasurePhotonFrame(VertexId v, Pauli axis);
  /// Fusion success as a graph-frame X(x)Z, Z(x)X measurement. If either
  /// qubit is already gone, the other is Z-deleted.
  void Join(VertexId v1, VertexId v2);
  /// Loss remedy: Z-measure every neighbor of v, then forget v.
  void CutOut(VertexId v);
  /// Failure in `basis`, or Join on success.
  void Fuse(VertexId v1, VertexId v2, FusionOutcome outcome, const FusionBasis& basis);

  /// Components of the remaining vertices, by the rewrite engine and by the
  /// tableau.
  std::vector<std::set<VertexId>> RewriteComponents() const;
  std::vector<std::set<VertexId>> TableauComponents() const;
  bool Agree() const { return RewriteComponents() == TableauComponents(); }

 private:
  PauliString GraphFramePauli(const std::vector<std::pair<VertexId, Pauli>>& factors) const;

  GraphState graph_;
  StabilizerTableau tableau_;
  std::map<VertexId, int> qubit_;
};

/// Qubit roles inside one site fragment (three 3-GHZ states).
struct SiteQubits {
  VertexId center;
  VertexId leaf[2];         // central GHZ leaves, fused with side i
  VertexId side_center[2];  // side GHZ centers
  VertexId arm[2][2];       // side GHZ leaves
};

/// Vertex ids 16 * site + role.
SiteQubits SiteQubitsOf(std::uint32_t site);

/// Explicit fragment for a lattice: three GHZ states per site.
GraphState LatticeFragment(const Dims& d);

/// Applies the internal fusions of every site. Within the stage: loss
/// remedies, then failures, then successes.
void ApplyInternalStage(DualFragment& f, const Dims& d,
                        const std::vector<std::pair<FusionResult, FusionResult>>& internal,
                        const FusionBasis& basis);

/// Applies every geometric bond fusion. Failures are Z x Z in the graph
/// frame. Same stage order as the internal stage.
void ApplyBondStage(DualFragment& f, const Dims& d, const ArmAssignment& assignment,
                    const BondResults& bonds, BondLossRemedy remedy);

/// Reads a SiteOutcome off the oracle's component structure after the
/// internal stage. Returns false if the structure fits no outcome.
bool OracleSiteOutcome(const DualFragment& f, std::uint32_t site, const ArmAssignment& assignment,
                       SiteOutcome* out);

struct CaseFailure {
  std::string description;
  std::string fragment;  // text form of the rewrite graph at failure
};

struct SuiteReport {
  std::string name;
  std::uint64_t cases = 0;
  std::uint64_t failures = 0;
  std::vector<CaseFailure> examples;  // first few failures

  bool passed() const { return cases > 0 && failures == 0; }
};

/// One forced scenario: checks rewrite vs tableau and fast rules vs tableau
/// (live centers and their connectivity). Returns an empty string on success.
std::string CheckScenario(const Dims& d, const ArmAssignment& assignment,
                          const FusionBasis& internal_basis,
                          const std::vector<std::pair<FusionResult, FusionResult>>& internal,
                          const BondResults& bonds, BondLossRemedy remedy,
                          std::string* fragment_text = nullptr);

/// Every internal outcome a gate can report: success, failure, and each
/// loss pattern (data1, data2, ancilla only, both data).
std::vector<FusionResult> InternalOutcomeSet();
/// Success, failure, loss of data1, of data2, of both.
std::vector<FusionResult> BondOutcomeSet();

std::string DescribeResult(const FusionResult& r);

SuiteReport SingleSiteSuite();
SuiteReport TwoSiteSuite();
SuiteReport DiagonalSuite();
SuiteReport RandomLatticeSuite(std::uint64_t seed, int instances_per_setting);

std::vector<SuiteReport> RunAllSuites(std::uint64_t seed = 1, int random_instances = 40);

}  // namespace fusionperc

#endif  // FUSIONPERC_ORACLE_CHECK_H_
