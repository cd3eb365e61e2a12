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

#include "fusionperc/lattice.h"

#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <stdexcept>

namespace fusionperc {

void Dims::Validate() const {
  if (lx < 1 || ly < 1 || lz < 1) throw std::invalid_argument("dims must all be >= 1");
}

std::vector<std::pair<SiteCoord, ArmSlot>> Neighbors(const SiteCoord& c, const Dims& d) {
  if (!c.InRange(d)) throw std::out_of_range("site coordinate outside the lattice");
  const int step = c.parity() == 0 ? 1 : -1;
  const std::pair<SiteCoord, ArmSlot> all[4] = {
      {{c.x - 1, c.y, c.z}, ArmSlot::kMinusX},
      {{c.x + 1, c.y, c.z}, ArmSlot::kPlusX},
      {{c.x, c.y + step, c.z}, ArmSlot::kT1},
      {{c.x, c.y, c.z + step}, ArmSlot::kT2},
  };
  std::vector<std::pair<SiteCoord, ArmSlot>> out;
  for (const auto& n : all) {
    if (n.first.InRange(d)) out.push_back(n);
  }
  return out;
}

bool LatticeAdjacent(const SiteCoord& a, const SiteCoord& b, const Dims& d) {
  if (!a.InRange(d) || !b.InRange(d)) return false;
  const int dx = b.x - a.x;
  const int dy = b.y - a.y;
  const int dz = b.z - a.z;
  const int step = a.parity() == 0 ? 1 : -1;
  if (dy == 0 && dz == 0) return dx == 1 || dx == -1;
  if (dx == 0 && dz == 0) return dy == step;
  if (dx == 0 && dy == 0) return dz == step;
  return false;
}

std::vector<GeometricBond> GeometricBonds(const Dims& d) {
  std::vector<GeometricBond> out;
  const auto n = static_cast<std::uint32_t>(d.site_count());
  for (std::uint32_t s = 0; s < n; ++s) {
    const SiteCoord c = CoordOf(s, d);
    if (c.x + 1 < d.lx) {
      out.push_back({3 * s, PortOf(s, ArmSlot::kPlusX), PortOf(s + 1, ArmSlot::kMinusX)});
    }
    if (c.parity() == 0) {
      if (c.y + 1 < d.ly) {
        const auto t = s + static_cast<std::uint32_t>(d.lx);
        out.push_back({3 * s + 1, PortOf(s, ArmSlot::kT1), PortOf(t, ArmSlot::kT1)});
      }
      if (c.z + 1 < d.lz) {
        const auto t = s + static_cast<std::uint32_t>(d.lx * d.ly);
        out.push_back({3 * s + 2, PortOf(s, ArmSlot::kT2), PortOf(t, ArmSlot::kT2)});
      }
    }
  }
  return out;
}

std::string_view LossModeName(LossMode m) {
  return m == LossMode::kUnheralded ? "unheralded" : "heralded";
}

std::optional<LossMode> ParseLossMode(std::string_view s) {
  if (s == "unheralded") return LossMode::kUnheralded;
  if (s == "heralded") return LossMode::kHeralded;
  return std::nullopt;
}

std::string_view RemedyName(BondLossRemedy r) {
  switch (r) {
    case BondLossRemedy::kCutBoth: return "cut_both";
    case BondLossRemedy::kCutLost: return "cut_lost";
    case BondLossRemedy::kVoidBond: return "void_bond";
  }
  return "?";
}

std::optional<BondLossRemedy> ParseRemedy(std::string_view s) {
  for (auto r : {BondLossRemedy::kCutBoth, BondLossRemedy::kCutLost, BondLossRemedy::kVoidBond}) {
    if (RemedyName(r) == s) return r;
  }
  return std::nullopt;
}

std::string_view ScopeName(LossScope s) {
  return s == LossScope::kDataOnly ? "data_only" : "data_and_ancilla";
}

std::optional<LossScope> ParseScope(std::string_view s) {
  if (s == "data_only") return LossScope::kDataOnly;
  if (s == "data_and_ancilla") return LossScope::kDataAndAncilla;
  return std::nullopt;
}

void LossSpec::Validate() const {
  if (!(p_loss >= 0.0 && p_loss <= 1.0)) {
    throw std::invalid_argument("loss.p_loss must lie in [0, 1]");
  }
}

std::string_view ProvenanceName(Provenance p) {
  return p == Provenance::kLattice ? "lattice" : "diagonal";
}

std::size_t PercolationGraph::CountBonds(Provenance p) const {
  return static_cast<std::size_t>(std::count_if(
      bonds.begin(), bonds.end(), [p](const Bond& b) { return b.provenance == p; }));
}

std::size_t PercolationGraph::RemovedCount() const {
  return static_cast<std::size_t>(std::count(removed.begin(), removed.end(), 1));
}

void PercolationGraph::PruneBonds() {
  bonds.erase(std::remove_if(bonds.begin(), bonds.end(),
                             [this](const Bond& b) { return !live(b.a) || !live(b.b); }),
              bonds.end());
}

bool PercolationGraph::Consistent() const {
  for (const Bond& b : bonds) {
    if (b.a >= sites.size() || b.b >= sites.size()) return false;
    if (!live(b.a) || !live(b.b)) return false;
    const bool adjacent = LatticeAdjacent(CoordOf(b.a, dims), CoordOf(b.b, dims), dims);
    if (b.provenance == Provenance::kDiagonal && adjacent) return false;
  }
  return true;
}

void InstanceParams::Validate() const {
  dims.Validate();
  gate.Validate();
  loss.Validate();
  if (!assignment.Valid()) throw std::invalid_argument("arm assignment must partition the slots");
  if (!SiteRuleFor(gate.failure_basis)) {
    throw std::invalid_argument("internal failure basis must be X/Z-type (graph-frame Z on the "
                                "leaf with X on the side center, or the reverse)");
  }
  const auto n = dims.site_count();
  if (n > (1u << 28)) throw std::invalid_argument("lattice too large");
}

namespace {

// Assembly core shared by the sampled and forced paths. `result(bond)`
// returns the fusion outcome of a geometric bond.
template <class ResultFn>
void Assemble(const Dims& d, BondLossRemedy remedy, ResultFn&& result,
              std::vector<std::int32_t>& link, std::vector<std::uint8_t>& killed,
              PercolationGraph& g) {
  const std::size_t n = d.site_count();
  g.dims = d;
  g.bonds.clear();
  g.via.clear();
  g.removed.assign(n, 0);
  link.assign(4 * n, -1);
  killed.assign(4 * n, 0);
  auto& sites = g.sites;

  auto cut_center_side = [&](std::uint32_t port) {
    const std::uint32_t s = port / 4;
    const auto slot = static_cast<ArmSlot>(port % 4);
    const SiteOutcome& o = sites[s];
    if (o.attached(slot)) {
      g.removed[s] = 1;
    } else if (const auto p = o.partner(slot)) {
      killed[PortOf(s, *p)] = 1;
    }
  };

  const auto lx = static_cast<std::uint32_t>(d.lx);
  const auto lxy = static_cast<std::uint32_t>(d.lx * d.ly);
  auto visit = [&](std::uint32_t id, std::uint32_t pa, std::uint32_t pb) {
    const FusionResult r = result(id);
    switch (r.kind) {
      case FusionKind::kSuccess:
        link[pa] = static_cast<std::int32_t>(pb);
        link[pb] = static_cast<std::int32_t>(pa);
        break;
      case FusionKind::kFailure:
        break;
      case FusionKind::kLossDetected:
        if (remedy == BondLossRemedy::kCutBoth) {
          cut_center_side(pa);
          cut_center_side(pb);
        } else if (remedy == BondLossRemedy::kCutLost) {
          if (r.lost.Contains(PhotonSet::kData1)) cut_center_side(pa);
          if (r.lost.Contains(PhotonSet::kData2)) cut_center_side(pb);
        }
        break;
    }
  };
  for (std::uint32_t z = 0, s = 0; z < static_cast<std::uint32_t>(d.lz); ++z) {
    for (std::uint32_t y = 0; y < static_cast<std::uint32_t>(d.ly); ++y) {
      for (std::uint32_t x = 0; x < lx; ++x, ++s) {
        if (x + 1 < lx) visit(3 * s, PortOf(s, ArmSlot::kPlusX), PortOf(s + 1, ArmSlot::kMinusX));
        if (((x + y + z) & 1u) == 0) {
          if (y + 1 < static_cast<std::uint32_t>(d.ly)) {
            visit(3 * s + 1, PortOf(s, ArmSlot::kT1), PortOf(s + lx, ArmSlot::kT1));
          }
          if (z + 1 < static_cast<std::uint32_t>(d.lz)) {
            visit(3 * s + 2, PortOf(s, ArmSlot::kT2), PortOf(s + lxy, ArmSlot::kT2));
          }
        }
      }
    }
  }

  // A port carries entanglement onward if it hangs off a live center or is
  // half of an intact detached pair.
  auto attached_live = [&](std::uint32_t port) {
    const std::uint32_t s = port / 4;
    return !killed[port] && sites[s].center_alive() && !g.removed[s] &&
           sites[s].attached(static_cast<ArmSlot>(port % 4));
  };

  for (std::uint32_t s = 0; s < n; ++s) {
    if (!sites[s].center_alive() || g.removed[s]) continue;
    for (ArmSlot slot : kAllSlots) {
      const std::uint32_t start = PortOf(s, slot);
      if (!attached_live(start) || link[start] < 0) continue;
      const auto via_begin = static_cast<std::uint32_t>(g.via.size());
      auto cur = static_cast<std::uint32_t>(link[start]);
      bool ended = false;
      while (true) {
        if (killed[cur]) break;
        const std::uint32_t t = cur / 4;
        const auto cslot = static_cast<ArmSlot>(cur % 4);
        if (sites[t].attached(cslot)) {
          ended = attached_live(cur);
          break;
        }
        const auto partner = sites[t].partner(cslot);
        if (!partner) break;
        const std::uint32_t other = PortOf(t, *partner);
        if (killed[other] || link[other] < 0) break;
        g.via.push_back(cur);
        g.via.push_back(other);
        cur = static_cast<std::uint32_t>(link[other]);
      }
      const std::uint32_t end_site = cur / 4;
      // Each chain is seen from both ends; keep it once.
      if (!ended || start > cur || end_site == s) {
        g.via.resize(via_begin);
        continue;
      }
      const auto via_count = static_cast<std::uint32_t>(g.via.size()) - via_begin;
      Provenance prov = Provenance::kLattice;
      if (via_count > 0 && !LatticeAdjacent(CoordOf(s, d), CoordOf(end_site, d), d)) {
        prov = Provenance::kDiagonal;
      }
      g.bonds.push_back({s, end_site, prov, via_begin, via_count});
    }
  }
}

}  // namespace

PercolationGraph AssembleInstance(const Dims& d, std::vector<SiteOutcome> sites,
                                  const BondResults& bonds, BondLossRemedy remedy) {
  d.Validate();
  if (sites.size() != d.site_count()) throw std::invalid_argument("one outcome per site required");
  if (bonds.size() < 3 * d.site_count()) {
    throw std::invalid_argument("bond results must be indexed by bond id (3 per site)");
  }
  PercolationGraph g;
  g.sites = std::move(sites);
  std::vector<std::int32_t> link;
  std::vector<std::uint8_t> killed;
  Assemble(
      d, remedy, [&](std::uint32_t id) { return bonds[id]; }, link, killed, g);
  return g;
}

void BuildInstance(const InstanceParams& params, const RunRng& rng, InstanceScratch& scratch,
                   PercolationGraph& out) {
  const Dims& d = params.dims;
  const std::size_t n = d.site_count();
  const auto rule = *SiteRuleFor(params.gate.failure_basis);
  const double p_loss = params.loss.gate_loss();
  const LossScope scope = params.loss.scope;
  out.sites.resize(n);
  PackedStream internal(rng, PackedStream::kFusionOutcomes);
  PackedStream external(rng, PackedStream::kFusionOutcomes);
  if (p_loss == 0.0) {
    // Loss-free gates only need their outcome draw; the four possible
    // sites are tabulated once.
    const double p = params.gate.p_success;
    const FusionResult ok = FusionResult::Success();
    const FusionResult bad = FusionResult::Failure();
    const SiteOutcome table[4] = {SiteOutcomeFrom(ok, ok, params.assignment, rule),
                                  SiteOutcomeFrom(ok, bad, params.assignment, rule),
                                  SiteOutcomeFrom(bad, ok, params.assignment, rule),
                                  SiteOutcomeFrom(bad, bad, params.assignment, rule)};
    for (std::uint32_t s = 0; s < n; ++s) {
      const int f1 = internal.At(InternalFusionEntity(s, 0)) < p ? 0 : 2;
      const int f2 = internal.At(InternalFusionEntity(s, 1)) < p ? 0 : 1;
      out.sites[s] = table[f1 | f2];
    }
    Assemble(
        d, params.loss.remedy,
        [&](std::uint32_t id) { return external.At(BondEntity(n, id)) < p ? ok : bad; },
        scratch.link, scratch.port_killed, out);
  } else {
    for (std::uint32_t s = 0; s < n; ++s) {
      const FusionResult r1 =
          SampleFusion(params.gate, p_loss, scope, rng, InternalFusionEntity(s, 0), internal);
      const FusionResult r2 =
          SampleFusion(params.gate, p_loss, scope, rng, InternalFusionEntity(s, 1), internal);
      out.sites[s] = SiteOutcomeFrom(r1, r2, params.assignment, rule);
    }
    Assemble(
        d, params.loss.remedy,
        [&](std::uint32_t id) {
          return SampleFusion(params.gate, p_loss, scope, rng, BondEntity(n, id), external);
        },
        scratch.link, scratch.port_killed, out);
  }
  if (params.loss.mode == LossMode::kHeralded) ApplyHeraldedLoss(out, params.loss.p_loss, rng);
}

PercolationGraph BuildInstance(const InstanceParams& params, const RunRng& rng) {
  params.Validate();
  InstanceScratch scratch;
  PercolationGraph g;
  BuildInstance(params, rng, scratch, g);
  return g;
}

void ApplyUnheraldedLoss(PercolationGraph& g, const std::vector<LostPhoton>& lost) {
  std::vector<std::uint8_t> cut(g.sites.size(), 0);
  std::vector<std::uint8_t> dead_port(4 * g.sites.size(), 0);
  for (const LostPhoton& l : lost) {
    if (l.site >= g.sites.size()) throw std::out_of_range("lost photon site out of range");
    if (l.kind == LostPhoton::Kind::kCenter) {
      cut[l.site] = 1;
      for (const Bond& b : g.bonds) {
        if (b.a == l.site) cut[b.b] = 1;
        if (b.b == l.site) cut[b.a] = 1;
      }
      continue;
    }
    const SiteOutcome& o = g.sites[l.site];
    if (o.attached(l.slot)) {
      cut[l.site] = 1;
    } else if (const auto p = o.partner(l.slot)) {
      dead_port[PortOf(l.site, l.slot)] = 1;
      dead_port[PortOf(l.site, *p)] = 1;
    }
  }
  for (std::size_t s = 0; s < cut.size(); ++s) {
    if (cut[s]) g.removed[s] = 1;
  }
  g.bonds.erase(std::remove_if(g.bonds.begin(), g.bonds.end(),
                               [&](const Bond& b) {
                                 if (!g.live(b.a) || !g.live(b.b)) return true;
                                 for (std::uint32_t i = 0; i < b.via_count; ++i) {
                                   if (dead_port[g.via[b.via_begin + i]]) return true;
                                 }
                                 return false;
                               }),
                g.bonds.end());
}

void ApplyHeraldedLoss(PercolationGraph& g, double p_loss, const RunRng& rng) {
  if (p_loss <= 0.0) return;
  const std::size_t n = g.sites.size();
  bool any = false;
  PackedStream draws(rng, PackedStream::kHeraldedRemoval);
  for (std::uint32_t s = 0; s < n; ++s) {
    if (draws.At(s) < p_loss) {
      g.removed[s] = 1;
      any = true;
    }
  }
  if (any) g.PruneBonds();
}

void WriteInstance(std::ostream& os, const PercolationGraph& g) {
  const Dims& d = g.dims;
  os << "dims " << d.lx << ' ' << d.ly << ' ' << d.lz << '\n';
  for (std::uint32_t s = 0; s < g.sites.size(); ++s) {
    const SiteCoord c = CoordOf(s, d);
    const std::string_view cls =
        g.removed[s] ? std::string_view("removed") : SiteClassName(g.sites[s].Class());
    os << "site " << c.x << ' ' << c.y << ' ' << c.z << ' ' << cls << '\n';
  }
  for (const Bond& b : g.bonds) {
    const SiteCoord a = CoordOf(b.a, d);
    const SiteCoord c = CoordOf(b.b, d);
    os << "bond " << a.x << ' ' << a.y << ' ' << a.z << ' ' << c.x << ' ' << c.y << ' ' << c.z
       << ' ' << ProvenanceName(b.provenance) << '\n';
  }
}

}  // namespace fusionperc
