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

#include "fusionperc/oracle_check.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "fusionperc/union_find.h"

namespace fusionperc {

namespace {

using Partition = std::vector<std::set<VertexId>>;

Partition Sorted(Partition p) {
  std::sort(p.begin(), p.end());
  return p;
}

}  // namespace

DualFragment::DualFragment(const GraphState& initial)
    : graph_(initial), tableau_(static_cast<int>(initial.VertexCount())) {
  int q = 0;
  for (VertexId v : initial.Vertices()) qubit_[v] = q++;
  std::vector<std::pair<int, int>> edges;
  for (const auto& [a, b] : initial.Edges()) edges.emplace_back(qubit_.at(a), qubit_.at(b));
  tableau_ = StabilizerTableau::FromEdges(q, edges);
  for (VertexId v : initial.Vertices()) tableau_.ApplyClifford(qubit_.at(v), initial.Tag(v));
}

PauliString DualFragment::GraphFramePauli(
    const std::vector<std::pair<VertexId, Pauli>>& factors) const {
  PauliString p(tableau_.qubits());
  bool negative = false;
  for (const auto& [v, axis] : factors) {
    const SignedPauli s = graph_.Tag(v).Conjugate(axis);
    p.Set(qubit_.at(v), s.axis);
    negative ^= s.negative;
  }
  p.set_negative(negative);
  return p;
}

void DualFragment::MeasureGraphFrame(VertexId v, Pauli axis) {
  tableau_.Measure(GraphFramePauli({{v, axis}}));
  graph_.MeasurePauli(v, axis);
}

void DualFragment::MeasurePhotonFrame(VertexId v, Pauli axis) {
  tableau_.MeasureSingle(qubit_.at(v), axis);
  graph_.MeasurePhoton(v, axis);
}

void DualFragment::Join(VertexId v1, VertexId v2) {
  const bool has1 = graph_.Contains(v1);
  const bool has2 = graph_.Contains(v2);
  if (!has1 || !has2) {
    if (has1) MeasureGraphFrame(v1, Pauli::kZ);
    if (has2) MeasureGraphFrame(v2, Pauli::kZ);
    return;
  }
  const PauliString xz = GraphFramePauli({{v1, Pauli::kX}, {v2, Pauli::kZ}});
  const PauliString zx = GraphFramePauli({{v1, Pauli::kZ}, {v2, Pauli::kX}});
  tableau_.Measure(xz);
  tableau_.Measure(zx);
  if (graph_.HasEdge(v1, v2)) {
    // X1 Z2 and Z1 X2 on a graph with edge v1-v2 are X1 and X2 on the graph
    // without it.
    graph_.ToggleEdge(v1, v2);
    graph_.MeasurePauli(v1, Pauli::kX);
    graph_.MeasurePauli(v2, Pauli::kX);
    return;
  }
  graph_.Fuse(v1, v2, FusionOutcome::kSuccess, FusionBasis::Standard());
}

void DualFragment::CutOut(VertexId v) {
  if (!graph_.Contains(v)) return;
  const std::set<VertexId> nv = graph_.Neighbors(v);
  for (VertexId w : nv) MeasureGraphFrame(w, Pauli::kZ);
  graph_.RemoveVertex(v);
}

void DualFragment::Fuse(VertexId v1, VertexId v2, FusionOutcome outcome,
                        const FusionBasis& basis) {
  if (outcome == FusionOutcome::kSuccess) {
    Join(v1, v2);
    return;
  }
  if (basis.mode == FusionMode::kStandard) {
    if (graph_.Contains(v1)) MeasureGraphFrame(v1, basis.first);
    if (graph_.Contains(v2)) MeasureGraphFrame(v2, basis.second);
    return;
  }
  if (graph_.Contains(v1)) MeasurePhotonFrame(v1, basis.first);
  if (graph_.Contains(v2)) MeasurePhotonFrame(v2, basis.second);
}

std::vector<std::set<VertexId>> DualFragment::RewriteComponents() const {
  return Sorted(graph_.Components());
}

std::vector<std::set<VertexId>> DualFragment::TableauComponents() const {
  std::vector<VertexId> vertex_of(qubit_.size());
  for (const auto& [v, q] : qubit_) vertex_of[static_cast<std::size_t>(q)] = v;
  Partition out;
  for (const auto& part : tableau_.Components()) {
    std::set<VertexId> s;
    for (int q : part) {
      const VertexId v = vertex_of[static_cast<std::size_t>(q)];
      if (graph_.Contains(v)) s.insert(v);
    }
    if (!s.empty()) out.push_back(std::move(s));
  }
  return Sorted(out);
}

SiteQubits SiteQubitsOf(std::uint32_t site) {
  const auto b = static_cast<VertexId>(16 * site);
  return {b, {b + 1, b + 2}, {b + 3, b + 6}, {{b + 4, b + 5}, {b + 7, b + 8}}};
}

GraphState LatticeFragment(const Dims& d) {
  GraphState g;
  for (std::uint32_t s = 0; s < d.site_count(); ++s) {
    const SiteQubits q = SiteQubitsOf(s);
    g.Merge(GraphState::Ghz(3, q.center));
    g.Merge(GraphState::Ghz(3, q.side_center[0]));
    g.Merge(GraphState::Ghz(3, q.side_center[1]));
  }
  return g;
}

namespace {

VertexId ArmVertex(std::uint32_t port, const ArmAssignment& assignment) {
  const std::uint32_t site = port / 4;
  const auto slot = static_cast<ArmSlot>(port % 4);
  const SiteQubits q = SiteQubitsOf(site);
  for (int j = 0; j < 2; ++j) {
    if (assignment.side1[j] == slot) return q.arm[0][j];
    if (assignment.side2[j] == slot) return q.arm[1][j];
  }
  throw std::logic_error("slot missing from assignment");
}

// Loss remedy for one gate: cut out the lost data photons, Z-delete the
// rest of the gate's photons.
void GateLossRemedy(DualFragment& f, VertexId d1, VertexId d2, bool cut1, bool cut2) {
  if (cut1) f.CutOut(d1);
  if (cut2) f.CutOut(d2);
  if (f.Contains(d1)) f.MeasureGraphFrame(d1, Pauli::kZ);
  if (f.Contains(d2)) f.MeasureGraphFrame(d2, Pauli::kZ);
}

}  // namespace

void ApplyInternalStage(DualFragment& f, const Dims& d,
                        const std::vector<std::pair<FusionResult, FusionResult>>& internal,
                        const FusionBasis& basis) {
  const auto n = static_cast<std::uint32_t>(d.site_count());
  for (FusionKind stage : {FusionKind::kLossDetected, FusionKind::kFailure, FusionKind::kSuccess}) {
    for (std::uint32_t s = 0; s < n; ++s) {
      const SiteQubits q = SiteQubitsOf(s);
      for (int side = 0; side < 2; ++side) {
        const FusionResult& r = side == 0 ? internal[s].first : internal[s].second;
        if (r.kind != stage) continue;
        const VertexId d1 = q.leaf[side];
        const VertexId d2 = q.side_center[side];
        switch (stage) {
          case FusionKind::kLossDetected:
            GateLossRemedy(f, d1, d2, r.lost.Contains(PhotonSet::kData1),
                           r.lost.Contains(PhotonSet::kData2));
            break;
          case FusionKind::kFailure:
            f.Fuse(d1, d2, FusionOutcome::kFailure, basis);
            break;
          case FusionKind::kSuccess:
            f.Join(d1, d2);
            break;
        }
      }
    }
  }
}

void ApplyBondStage(DualFragment& f, const Dims& d, const ArmAssignment& assignment,
                    const BondResults& bonds, BondLossRemedy remedy) {
  const auto geometry = GeometricBonds(d);
  for (FusionKind stage : {FusionKind::kLossDetected, FusionKind::kFailure, FusionKind::kSuccess}) {
    for (const GeometricBond& gb : geometry) {
      const FusionResult& r = bonds.at(gb.id);
      if (r.kind != stage) continue;
      const VertexId a = ArmVertex(gb.owner_port, assignment);
      const VertexId b = ArmVertex(gb.other_port, assignment);
      switch (stage) {
        case FusionKind::kLossDetected: {
          bool cut_a = false;
          bool cut_b = false;
          if (remedy == BondLossRemedy::kCutBoth) {
            cut_a = cut_b = true;
          } else if (remedy == BondLossRemedy::kCutLost) {
            cut_a = r.lost.Contains(PhotonSet::kData1);
            cut_b = r.lost.Contains(PhotonSet::kData2);
          }
          GateLossRemedy(f, a, b, cut_a, cut_b);
          break;
        }
        case FusionKind::kFailure:
          f.Fuse(a, b, FusionOutcome::kFailure, FusionBasis::Standard());
          break;
        case FusionKind::kSuccess:
          f.Join(a, b);
          break;
      }
    }
  }
}

bool OracleSiteOutcome(const DualFragment& f, std::uint32_t site, const ArmAssignment& assignment,
                       SiteOutcome* out) {
  const SiteQubits q = SiteQubitsOf(site);
  const auto comps = f.TableauComponents();
  auto component_of = [&](VertexId v) -> const std::set<VertexId>* {
    for (const auto& c : comps) {
      if (c.count(v)) return &c;
    }
    return nullptr;
  };
  SiteOutcome o;
  const bool alive = f.Contains(q.center);
  o.set_center_alive(alive);
  const std::set<VertexId>* center_comp = alive ? component_of(q.center) : nullptr;
  const std::array<const std::array<ArmSlot, 2>*, 2> slots{&assignment.side1, &assignment.side2};
  for (int side = 0; side < 2; ++side) {
    for (int j = 0; j < 2; ++j) {
      const VertexId arm = q.arm[side][j];
      const ArmSlot slot = (*slots[side])[j];
      if (!f.Contains(arm)) continue;
      if (center_comp && center_comp->count(arm)) {
        o.Attach(slot);
        continue;
      }
      const std::set<VertexId>* c = component_of(arm);
      if (c->size() == 1) continue;
      const VertexId other = q.arm[side][1 - j];
      if (c->size() == 2 && c->count(other)) {
        o.Pair((*slots[side])[0], (*slots[side])[1]);
        continue;
      }
      return false;
    }
  }
  // A center's component may hold only the center and its attached arms.
  if (center_comp && center_comp->size() != static_cast<std::size_t>(1 + o.attached_count())) {
    return false;
  }
  *out = o;
  return true;
}

std::string DescribeResult(const FusionResult& r) {
  switch (r.kind) {
    case FusionKind::kSuccess: return "S";
    case FusionKind::kFailure: return "F";
    case FusionKind::kLossDetected: {
      std::string s = "L(";
      bool first = true;
      for (auto role : r.lost.roles()) {
        if (!first) s += ",";
        s += RoleName(role);
        first = false;
      }
      return s + ")";
    }
  }
  return "?";
}

std::vector<FusionResult> InternalOutcomeSet() {
  auto loss = [](std::initializer_list<PhotonSet::Role> roles) {
    PhotonSet p;
    for (auto r : roles) p.Add(r);
    return FusionResult::Loss(p);
  };
  return {FusionResult::Success(),
          FusionResult::Failure(),
          loss({PhotonSet::kData1}),
          loss({PhotonSet::kData2}),
          loss({PhotonSet::kAncilla0}),
          loss({PhotonSet::kData1, PhotonSet::kData2})};
}

std::vector<FusionResult> BondOutcomeSet() {
  auto loss = [](std::initializer_list<PhotonSet::Role> roles) {
    PhotonSet p;
    for (auto r : roles) p.Add(r);
    return FusionResult::Loss(p);
  };
  return {FusionResult::Success(), FusionResult::Failure(), loss({PhotonSet::kData1}),
          loss({PhotonSet::kData2}), loss({PhotonSet::kData1, PhotonSet::kData2})};
}

namespace {

std::string DescribeScenario(const Dims& d, const ArmAssignment& assignment,
                             const FusionBasis& basis,
                             const std::vector<std::pair<FusionResult, FusionResult>>& internal,
                             const BondResults& bonds, BondLossRemedy remedy) {
  std::ostringstream os;
  os << "dims " << d.lx << 'x' << d.ly << 'x' << d.lz << ' ' << assignment.ToString()
     << " internal_failure=" << PauliChar(basis.first) << PauliChar(basis.second)
     << " remedy=" << RemedyName(remedy) << " sites:";
  for (const auto& [a, b] : internal) os << ' ' << DescribeResult(a) << '/' << DescribeResult(b);
  os << " bonds:";
  for (const GeometricBond& gb : GeometricBonds(d)) {
    os << ' ' << gb.id << '=' << DescribeResult(bonds[gb.id]);
  }
  return os.str();
}

}  // namespace

std::string CheckScenario(const Dims& d, const ArmAssignment& assignment,
                          const FusionBasis& internal_basis,
                          const std::vector<std::pair<FusionResult, FusionResult>>& internal,
                          const BondResults& bonds, BondLossRemedy remedy,
                          std::string* fragment_text) {
  const auto rule = SiteRuleFor(internal_basis);
  if (!rule) return "unsupported internal failure basis";
  const auto n = static_cast<std::uint32_t>(d.site_count());

  DualFragment f(LatticeFragment(d));
  ApplyInternalStage(f, d, internal, internal_basis);
  auto fail = [&](const std::string& what) {
    if (fragment_text) *fragment_text = f.graph().ToText();
    return what + " | " + DescribeScenario(d, assignment, internal_basis, internal, bonds, remedy);
  };
  if (!f.Agree()) return fail("rewrite and tableau disagree after internal fusions");

  std::vector<SiteOutcome> sites;
  for (std::uint32_t s = 0; s < n; ++s) {
    const SiteOutcome fast =
        SiteOutcomeFrom(internal[s].first, internal[s].second, assignment, *rule);
    SiteOutcome oracle;
    if (!OracleSiteOutcome(f, s, assignment, &oracle)) {
      return fail("site " + std::to_string(s) + " has a structure no outcome describes");
    }
    if (!(oracle == fast)) {
      return fail("site " + std::to_string(s) + " outcome differs (fast class " +
                  std::string(SiteClassName(fast.Class())) + ", oracle class " +
                  std::string(SiteClassName(oracle.Class())) + ")");
    }
    sites.push_back(fast);
  }

  ApplyBondStage(f, d, assignment, bonds, remedy);
  if (!f.Agree()) return fail("rewrite and tableau disagree after bond fusions");

  const PercolationGraph g = AssembleInstance(d, sites, bonds, remedy);
  if (!g.Consistent()) return fail("assembled graph violates its invariants");
  for (std::uint32_t s = 0; s < n; ++s) {
    if (g.live(s) != f.Contains(SiteQubitsOf(s).center)) {
      return fail("site " + std::to_string(s) + " liveness differs");
    }
  }
  UnionFind uf(n);
  for (const Bond& b : g.bonds) uf.Union(b.a, b.b);
  const auto comps = f.TableauComponents();
  std::map<VertexId, std::size_t> comp_of;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    for (VertexId v : comps[i]) comp_of[v] = i;
  }
  for (std::uint32_t a = 0; a < n; ++a) {
    if (!g.live(a)) continue;
    for (std::uint32_t b = a + 1; b < n; ++b) {
      if (!g.live(b)) continue;
      const bool fast = uf.Connected(a, b);
      const bool oracle =
          comp_of.at(SiteQubitsOf(a).center) == comp_of.at(SiteQubitsOf(b).center);
      if (fast != oracle) {
        return fail("centers " + std::to_string(a) + " and " + std::to_string(b) +
                    (oracle ? " connected in oracle only" : " connected in fast rules only"));
      }
    }
  }
  return {};
}

namespace {

void Record(SuiteReport& r, const std::string& error, const std::string& fragment) {
  ++r.cases;
  if (error.empty()) return;
  ++r.failures;
  if (r.examples.size() < 5) r.examples.push_back({error, fragment});
}

const std::vector<FusionBasis>& InternalBases() {
  static const std::vector<FusionBasis> bases = {
      FusionBasis::Rotated(), FusionBasis{FusionMode::kRotated, Pauli::kZ, Pauli::kZ}};
  return bases;
}

}  // namespace

SuiteReport SingleSiteSuite() {
  SuiteReport r;
  r.name = "single_site";
  const Dims d{1, 1, 1};
  const BondResults bonds(3, FusionResult::Failure());
  const auto outcomes = InternalOutcomeSet();
  for (const FusionBasis& basis : InternalBases()) {
    for (const ArmAssignment& a : AllPairings()) {
      for (const auto& r1 : outcomes) {
        for (const auto& r2 : outcomes) {
          std::string frag;
          const std::string err =
              CheckScenario(d, a, basis, {{r1, r2}}, bonds, BondLossRemedy::kCutBoth, &frag);
          Record(r, err, frag);
        }
      }
    }
  }
  return r;
}

SuiteReport TwoSiteSuite() {
  SuiteReport r;
  r.name = "two_site";
  const auto internal = InternalOutcomeSet();
  const auto bond_set = BondOutcomeSet();
  for (const Dims d : {Dims{2, 1, 1}, Dims{1, 2, 1}, Dims{1, 1, 2}}) {
    const std::uint32_t bond_id = GeometricBonds(d).at(0).id;
    for (BondLossRemedy remedy :
         {BondLossRemedy::kCutBoth, BondLossRemedy::kCutLost, BondLossRemedy::kVoidBond}) {
      for (const auto& bond : bond_set) {
        BondResults bonds(6, FusionResult::Failure());
        bonds[bond_id] = bond;
        for (const auto& a1 : internal) {
          for (const auto& a2 : internal) {
            for (const auto& b1 : internal) {
              for (const auto& b2 : internal) {
                std::string frag;
                const std::string err = CheckScenario(d, DefaultAssignment(), FusionBasis::Rotated(),
                                                      {{a1, a2}, {b1, b2}}, bonds, remedy, &frag);
                Record(r, err, frag);
              }
            }
          }
        }
      }
    }
  }
  return r;
}

SuiteReport DiagonalSuite() {
  SuiteReport r;
  r.name = "diagonal";
  const std::vector<FusionResult> sf = {FusionResult::Success(), FusionResult::Failure()};
  const auto bond_set = BondOutcomeSet();
  for (const ArmAssignment& assignment : AllPairings()) {
    for (BondLossRemedy remedy :
         {BondLossRemedy::kCutBoth, BondLossRemedy::kCutLost, BondLossRemedy::kVoidBond}) {
      // 3x1x1: every success/failure pattern inside, every bond outcome.
      const Dims line{3, 1, 1};
      for (int mask = 0; mask < 64; ++mask) {
        std::vector<std::pair<FusionResult, FusionResult>> internal;
        for (int s = 0; s < 3; ++s) {
          internal.emplace_back(sf[(mask >> (2 * s)) & 1], sf[(mask >> (2 * s + 1)) & 1]);
        }
        for (const auto& b0 : bond_set) {
          for (const auto& b1 : bond_set) {
            BondResults bonds(9, FusionResult::Failure());
            bonds[0] = b0;
            bonds[3] = b1;
            std::string frag;
            Record(r, CheckScenario(line, assignment, FusionBasis::Rotated(), internal, bonds,
                                    remedy, &frag),
                   frag);
          }
        }
      }
    }
    // 2x2x1 and 2x3x1: transverse and X arms meet at one site.
    for (const Dims d : {Dims{2, 2, 1}, Dims{2, 3, 1}}) {
      const auto geometry = GeometricBonds(d);
      const int n = static_cast<int>(d.site_count());
      const int internal_bits = 2 * n;
      const int bond_bits = static_cast<int>(geometry.size());
      // Exhaustive for 2x2x1; a fixed stride through the patterns for 2x3x1.
      const std::uint64_t total = std::uint64_t{1} << (internal_bits + bond_bits);
      const std::uint64_t stride = total > 8192 ? total / 8191 : 1;
      for (std::uint64_t mask = 0; mask < total; mask += stride) {
        std::vector<std::pair<FusionResult, FusionResult>> internal;
        for (int s = 0; s < n; ++s) {
          internal.emplace_back(sf[(mask >> (2 * s)) & 1], sf[(mask >> (2 * s + 1)) & 1]);
        }
        BondResults bonds(3 * static_cast<std::size_t>(n), FusionResult::Failure());
        for (int b = 0; b < bond_bits; ++b) {
          bonds[geometry[static_cast<std::size_t>(b)].id] = sf[(mask >> (internal_bits + b)) & 1];
        }
        std::string frag;
        Record(r, CheckScenario(d, assignment, FusionBasis::Rotated(), internal, bonds,
                                BondLossRemedy::kCutBoth, &frag),
               frag);
      }
    }
  }
  return r;
}

SuiteReport RandomLatticeSuite(std::uint64_t seed, int instances_per_setting) {
  SuiteReport r;
  r.name = "random_lattice";
  const Dims d{3, 2, 2};
  const auto n = static_cast<std::uint32_t>(d.site_count());
  std::uint64_t run = 0;
  for (const FusionBasis& basis : InternalBases()) {
    for (const ArmAssignment& assignment : AllPairings()) {
      for (BondLossRemedy remedy :
           {BondLossRemedy::kCutBoth, BondLossRemedy::kCutLost, BondLossRemedy::kVoidBond}) {
        for (int i = 0; i < instances_per_setting; ++i, ++run) {
          const RunRng rng(seed, run);
          PackedStream outcomes(rng, PackedStream::kFusionOutcomes);
          GateParams gate;
          gate.p_success = 0.6;
          const double p_loss = 0.06;
          std::vector<std::pair<FusionResult, FusionResult>> internal;
          for (std::uint32_t s = 0; s < n; ++s) {
            const FusionResult r1 = SampleFusion(gate, p_loss, LossScope::kDataAndAncilla, rng,
                                                 InternalFusionEntity(s, 0), outcomes);
            const FusionResult r2 = SampleFusion(gate, p_loss, LossScope::kDataAndAncilla, rng,
                                                 InternalFusionEntity(s, 1), outcomes);
            internal.emplace_back(r1, r2);
          }
          BondResults bonds(3 * n, FusionResult::Failure());
          for (const GeometricBond& gb : GeometricBonds(d)) {
            bonds[gb.id] = SampleFusion(gate, p_loss, LossScope::kDataAndAncilla, rng,
                                        BondEntity(n, gb.id), outcomes);
          }
          std::string frag;
          Record(r, CheckScenario(d, assignment, basis, internal, bonds, remedy, &frag), frag);
        }
      }
    }
  }
  return r;
}

std::vector<SuiteReport> RunAllSuites(std::uint64_t seed, int random_instances) {
  return {SingleSiteSuite(), TwoSiteSuite(), DiagonalSuite(),
          RandomLatticeSuite(seed, random_instances)};
}

}  // namespace fusionperc
