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

#include "fusionperc/graph_state.h"

#include <sstream>
#include <stdexcept>

namespace fusionperc {

GraphState GraphState::Ghz(int n, VertexId first_id) {
  if (n < 1) throw std::invalid_argument("GHZ state needs at least one qubit");
  GraphState g;
  g.AddVertex(first_id);
  for (int i = 1; i < n; ++i) {
    g.AddVertex(first_id + i, Clifford::Hadamard());
    g.AddEdge(first_id, first_id + i);
  }
  return g;
}

void GraphState::Require(VertexId v) const {
  if (!Contains(v)) {
    throw std::out_of_range("vertex " + std::to_string(v) + " not in graph");
  }
}

void GraphState::AddVertex(VertexId v, Clifford tag) {
  if (Contains(v)) {
    throw std::invalid_argument("vertex " + std::to_string(v) + " already present");
  }
  adj_[v];
  tags_[v] = tag;
}

void GraphState::AddEdge(VertexId a, VertexId b) {
  if (!HasEdge(a, b)) ToggleEdge(a, b);
}

void GraphState::ToggleEdge(VertexId a, VertexId b) {
  if (a == b) throw std::invalid_argument("self-loops are not allowed");
  Require(a);
  Require(b);
  auto& na = adj_[a];
  if (na.erase(b)) {
    adj_[b].erase(a);
  } else {
    na.insert(b);
    adj_[b].insert(a);
  }
}

void GraphState::RemoveVertex(VertexId v) {
  Require(v);
  for (VertexId w : adj_[v]) adj_[w].erase(v);
  adj_.erase(v);
  tags_.erase(v);
}

bool GraphState::HasEdge(VertexId a, VertexId b) const {
  const auto it = adj_.find(a);
  return it != adj_.end() && it->second.count(b) != 0;
}

const std::set<VertexId>& GraphState::Neighbors(VertexId v) const {
  Require(v);
  return adj_.at(v);
}

std::size_t GraphState::EdgeCount() const {
  std::size_t twice = 0;
  for (const auto& [v, n] : adj_) twice += n.size();
  return twice / 2;
}

std::vector<VertexId> GraphState::Vertices() const {
  std::vector<VertexId> out;
  out.reserve(adj_.size());
  for (const auto& [v, n] : adj_) out.push_back(v);
  return out;
}

std::vector<std::pair<VertexId, VertexId>> GraphState::Edges() const {
  std::vector<std::pair<VertexId, VertexId>> out;
  for (const auto& [v, n] : adj_) {
    for (VertexId w : n) {
      if (v < w) out.emplace_back(v, w);
    }
  }
  return out;
}

const Clifford& GraphState::Tag(VertexId v) const {
  Require(v);
  return tags_.at(v);
}

void GraphState::SetTag(VertexId v, Clifford tag) {
  Require(v);
  tags_[v] = tag;
}

void GraphState::Merge(const GraphState& other) {
  for (const auto& [v, n] : other.adj_) {
    if (Contains(v)) {
      throw std::invalid_argument("merge: vertex " + std::to_string(v) + " collides");
    }
  }
  for (const auto& [v, n] : other.adj_) adj_[v] = n;
  for (const auto& [v, t] : other.tags_) tags_[v] = t;
}

void GraphState::LocalComplement(VertexId v) {
  Require(v);
  const std::vector<VertexId> nv(adj_[v].begin(), adj_[v].end());
  for (std::size_t i = 0; i < nv.size(); ++i) {
    for (std::size_t j = i + 1; j < nv.size(); ++j) ToggleEdge(nv[i], nv[j]);
  }
  // |tau_v G> = U |G> with U = sqrt(-iX)_v prod_w sqrt(iZ)_w, so each tag
  // absorbs the inverse of its factor.
  const Clifford x_inv = Clifford::SqrtX().Inverse();
  const Clifford z_inv = Clifford::SqrtZ().Inverse();
  tags_[v] = tags_[v] * x_inv;
  for (VertexId w : nv) tags_[w] = tags_[w] * z_inv;
}

void GraphState::MeasurePauli(VertexId v, Pauli axis) {
  Require(v);
  switch (axis) {
    case Pauli::kZ:
      RemoveVertex(v);
      return;
    case Pauli::kY:
      LocalComplement(v);
      RemoveVertex(v);
      return;
    case Pauli::kX: {
      if (adj_[v].empty()) {
        RemoveVertex(v);
        return;
      }
      const VertexId b0 = *adj_[v].begin();
      LocalComplement(b0);
      LocalComplement(v);
      RemoveVertex(v);
      LocalComplement(b0);
      return;
    }
  }
}

Pauli GraphState::GraphAxis(VertexId v, Pauli axis) const {
  return Tag(v).Inverse().Conjugate(axis).axis;
}

void GraphState::MeasurePhoton(VertexId v, Pauli axis) {
  MeasurePauli(v, GraphAxis(v, axis));
}

std::pair<Pauli, Pauli> GraphState::FailureAxes(VertexId v1, VertexId v2,
                                                const FusionBasis& basis) const {
  if (basis.mode == FusionMode::kRotated) return {basis.first, basis.second};
  return {Tag(v1).Conjugate(basis.first).axis, Tag(v2).Conjugate(basis.second).axis};
}

void GraphState::Fuse(VertexId v1, VertexId v2, FusionOutcome outcome,
                      const FusionBasis& basis) {
  if (v1 == v2) throw std::invalid_argument("cannot fuse a qubit with itself");
  Require(v1);
  Require(v2);
  if (HasEdge(v1, v2)) {
    throw std::invalid_argument("fusion of adjacent qubits " + std::to_string(v1) +
                                " and " + std::to_string(v2));
  }
  if (outcome == FusionOutcome::kFailure) {
    const auto [a1, a2] = FailureAxes(v1, v2, basis);
    MeasurePhoton(v1, a1);
    MeasurePhoton(v2, a2);
    return;
  }
  const std::vector<VertexId> n1(adj_[v1].begin(), adj_[v1].end());
  const std::vector<VertexId> n2(adj_[v2].begin(), adj_[v2].end());
  RemoveVertex(v1);
  RemoveVertex(v2);
  for (VertexId a : n1) {
    for (VertexId b : n2) {
      if (a != b) ToggleEdge(a, b);
    }
  }
}

void GraphState::CutOut(VertexId v) {
  Require(v);
  const std::vector<VertexId> nv(adj_[v].begin(), adj_[v].end());
  for (VertexId w : nv) MeasurePauli(w, Pauli::kZ);
  RemoveVertex(v);
}

std::set<VertexId> GraphState::ConnectedComponent(VertexId v) const {
  Require(v);
  std::set<VertexId> seen{v};
  std::vector<VertexId> stack{v};
  while (!stack.empty()) {
    const VertexId u = stack.back();
    stack.pop_back();
    for (VertexId w : adj_.at(u)) {
      if (seen.insert(w).second) stack.push_back(w);
    }
  }
  return seen;
}

std::vector<std::set<VertexId>> GraphState::Components() const {
  std::vector<std::set<VertexId>> out;
  std::set<VertexId> done;
  for (const auto& [v, n] : adj_) {
    if (done.count(v)) continue;
    auto comp = ConnectedComponent(v);
    done.insert(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

std::string GraphState::ToText() const {
  std::ostringstream os;
  for (const auto& [v, n] : adj_) os << "v " << v << "\n";
  for (const auto& [a, b] : Edges()) os << "e " << a << " " << b << "\n";
  for (const auto& [v, t] : tags_) {
    if (!(t == Clifford())) os << "lc " << v << " " << t.Name() << "\n";
  }
  return os.str();
}

GraphState GraphState::FromText(std::string_view text) {
  GraphState g;
  std::istringstream is{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind) || kind[0] == '#') continue;
    auto fail = [&](const std::string& why) {
      throw std::invalid_argument("fragment line " + std::to_string(line_no) + ": " + why);
    };
    if (kind == "v") {
      VertexId v;
      if (!(ls >> v)) fail("expected 'v <id>'");
      g.AddVertex(v);
    } else if (kind == "e") {
      VertexId a, b;
      if (!(ls >> a >> b)) fail("expected 'e <id> <id>'");
      if (!g.Contains(a) || !g.Contains(b)) fail("edge references unknown vertex");
      if (a == b) fail("self-loop");
      g.AddEdge(a, b);
    } else if (kind == "lc") {
      VertexId v;
      std::string tag;
      if (!(ls >> v >> tag)) fail("expected 'lc <id> <tag>'");
      const auto c = Clifford::Parse(tag);
      if (!c) fail("bad clifford tag '" + tag + "'");
      if (!g.Contains(v)) fail("tag references unknown vertex");
      g.SetTag(v, *c);
    } else {
      fail("unknown record '" + kind + "'");
    }
  }
  return g;
}

}  // namespace fusionperc
