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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fusionperc/lattice.h"

using namespace fusionperc;

namespace {

const FusionResult S = FusionResult::Success();
const FusionResult F = FusionResult::Failure();

InstanceParams Params(Dims d, double p, double p_loss = 0.0,
                      LossMode mode = LossMode::kUnheralded) {
  InstanceParams ip;
  ip.dims = d;
  ip.gate.p_success = p;
  ip.loss.p_loss = p_loss;
  ip.loss.mode = mode;
  return ip;
}

std::vector<SiteOutcome> FullStars(const Dims& d) {
  return std::vector<SiteOutcome>(d.site_count(), SiteOutcomeFrom(S, S, DefaultAssignment()));
}

BondResults AllBonds(const Dims& d, const FusionResult& r) {
  return BondResults(3 * d.site_count(), r);
}

std::uint32_t BondAt(const Dims& d, std::uint32_t site, ArmSlot slot) {
  const std::uint32_t port = PortOf(site, slot);
  for (const GeometricBond& b : GeometricBonds(d)) {
    if (b.owner_port == port || b.other_port == port) return b.id;
  }
  throw std::logic_error("no bond at port");
}

bool HasBond(const PercolationGraph& g, std::uint32_t a, std::uint32_t b) {
  return std::any_of(g.bonds.begin(), g.bonds.end(), [&](const Bond& x) {
    return (x.a == a && x.b == b) || (x.a == b && x.b == a);
  });
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("corner site neighbors") {
    const Dims d = Dims::Cube(3);
    const auto n = Neighbors({0, 0, 0}, d);
    REQUIRE(n.size() == 3);
    CHECK(n[0].first == SiteCoord{1, 0, 0});
    CHECK(n[0].second == ArmSlot::kPlusX);
    CHECK(n[1].first == SiteCoord{0, 1, 0});
    CHECK(n[1].second == ArmSlot::kT1);
    CHECK(n[2].first == SiteCoord{0, 0, 1});
    CHECK(n[2].second == ArmSlot::kT2);
  }

  TEST_CASE("bulk sites have four neighbors") {
    const Dims d = Dims::Cube(5);
    for (int x = 1; x < 4; ++x)
      for (int y = 1; y < 4; ++y)
        for (int z = 1; z < 4; ++z) CHECK(Neighbors({x, y, z}, d).size() == 4);
  }

  TEST_CASE("out-of-range coordinates are rejected") {
    CHECK_THROWS(Neighbors({3, 0, 0}, Dims::Cube(3)));
    CHECK_THROWS(Neighbors({0, -1, 0}, Dims::Cube(3)));
    CHECK_THROWS_AS(Dims({0, 1, 1}).Validate(), std::invalid_argument);
  }

  TEST_CASE("neighbor relation is symmetric with matching slots") {
    const Dims d = Dims::Cube(4);
    for (std::uint32_t s = 0; s < d.site_count(); ++s) {
      const SiteCoord u = CoordOf(s, d);
      CHECK(SiteIndex(u, d) == s);
      for (const auto& [v, slot] : Neighbors(u, d)) {
        const auto back = Neighbors(v, d);
        const bool found = std::any_of(back.begin(), back.end(), [&](const auto& e) {
          return e.first == u && e.second == MatchingSlot(slot);
        });
        CHECK(found);
        CHECK(LatticeAdjacent(u, v, d));
        CHECK(u.parity() != v.parity());
      }
    }
  }

  TEST_CASE("geometric bonds cover each neighbor pair once") {
    for (const Dims d : {Dims::Cube(2), Dims::Cube(4), Dims{5, 2, 3}}) {
      std::size_t half_degree = 0;
      for (std::uint32_t s = 0; s < d.site_count(); ++s)
        half_degree += Neighbors(CoordOf(s, d), d).size();
      const auto bonds = GeometricBonds(d);
      CHECK(2 * bonds.size() == half_degree);
      for (std::size_t i = 1; i < bonds.size(); ++i) CHECK(bonds[i - 1].id < bonds[i].id);
    }
  }
}

TEST_SUITE("lattice") {
  TEST_CASE("p = 1 on 2x2x2 gives 8 lattice bonds") {
    // 4 X bonds; only the two parity-0 sites at y = 0 (z = 0) send T1 (T2)
    // into range, so 2 T1 and 2 T2 bonds.
    const PercolationGraph g = BuildInstance(Params(Dims::Cube(2), 1.0), RunRng(1, 0));
    CHECK(g.bonds.size() == 8);
    CHECK(g.CountBonds(Provenance::kLattice) == 8);
    CHECK(g.CountBonds(Provenance::kDiagonal) == 0);
    CHECK(g.Consistent());
  }

  TEST_CASE("p = 1 gives every geometric bond") {
    const Dims d{6, 4, 5};
    const PercolationGraph g = BuildInstance(Params(d, 1.0), RunRng(1, 0));
    CHECK(g.bonds.size() == GeometricBonds(d).size());
    CHECK(g.CountBonds(Provenance::kDiagonal) == 0);
  }

  TEST_CASE("p = 0 gives no bonds") {
    for (std::uint64_t r = 0; r < 20; ++r) {
      const PercolationGraph g = BuildInstance(Params(Dims::Cube(5), 0.0), RunRng(2, r));
      CHECK(g.bonds.empty());
    }
  }

  TEST_CASE("failed internal fusion bridges its two neighbors diagonally") {
    // u = (1,1,0) has parity 0, so -X faces (0,1,0) and T1 faces (1,2,0).
    const Dims d{3, 3, 1};
    const std::uint32_t u = SiteIndex({1, 1, 0}, d);
    const std::uint32_t v = SiteIndex({0, 1, 0}, d);
    const std::uint32_t w = SiteIndex({1, 2, 0}, d);
    auto sites = FullStars(d);
    sites[u] = SiteOutcomeFrom(F, S, DefaultAssignment());
    BondResults bonds = AllBonds(d, F);
    bonds[BondAt(d, u, ArmSlot::kMinusX)] = S;
    bonds[BondAt(d, u, ArmSlot::kT1)] = S;
    const PercolationGraph g = AssembleInstance(d, sites, bonds);
    REQUIRE(g.bonds.size() == 1);
    CHECK(g.bonds[0].provenance == Provenance::kDiagonal);
    CHECK(HasBond(g, v, w));
    CHECK_FALSE(LatticeAdjacent(CoordOf(v, d), CoordOf(w, d), d));
    CHECK(g.Consistent());

    // Without the second fusion there is nothing to bridge.
    bonds[BondAt(d, u, ArmSlot::kT1)] = F;
    CHECK(AssembleInstance(d, sites, bonds).bonds.empty());
  }

  TEST_CASE("boundary-facing detached pairs are dead") {
    const Dims d{3, 3, 1};
    auto sites = FullStars(d);
    // (0,0,0): -X and T2 face outside; pair {-X, T1} detached on side 1.
    sites[0] = SiteOutcomeFrom(F, S, DefaultAssignment());
    const PercolationGraph g = AssembleInstance(d, sites, AllBonds(d, S));
    CHECK(g.CountBonds(Provenance::kDiagonal) == 0);
    CHECK(g.Consistent());
  }

  TEST_CASE("no losses leave the instance unchanged") {
    PercolationGraph g = BuildInstance(Params(Dims::Cube(4), 0.75), RunRng(3, 1));
    const PercolationGraph before = g;
    ApplyUnheraldedLoss(g, {});
    CHECK(g.bonds.size() == before.bonds.size());
    CHECK(g.removed == before.removed);
  }

  TEST_CASE("lost center takes its bonded partners with it") {
    const Dims d{3, 3, 1};
    PercolationGraph g = AssembleInstance(d, FullStars(d), AllBonds(d, S));
    const std::uint32_t c = SiteIndex({1, 1, 0}, d);
    int partners = 0;
    for (const Bond& b : g.bonds) partners += (b.a == c || b.b == c);
    REQUIRE(partners == 3);
    ApplyUnheraldedLoss(g, {{c, LostPhoton::Kind::kCenter}});
    CHECK(g.RemovedCount() == 4);
    CHECK(g.removed[c]);
    CHECK(g.removed[SiteIndex({0, 1, 0}, d)]);
    CHECK(g.removed[SiteIndex({2, 1, 0}, d)]);
    CHECK(g.removed[SiteIndex({1, 2, 0}, d)]);
    CHECK(g.Consistent());
  }

  TEST_CASE("lost arm on a full star removes that center") {
    const Dims d{3, 3, 1};
    PercolationGraph g = AssembleInstance(d, FullStars(d), AllBonds(d, S));
    const std::uint32_t c = SiteIndex({1, 1, 0}, d);
    const std::size_t before = g.bonds.size();
    ApplyUnheraldedLoss(g, {{c, LostPhoton::Kind::kArm, ArmSlot::kPlusX}});
    CHECK(g.RemovedCount() == 1);
    CHECK(g.removed[c]);
    CHECK(g.bonds.size() == before - 3);
    for (const Bond& b : g.bonds) CHECK((b.a != c && b.b != c));
  }

  TEST_CASE("heralded loss: p = 0 and p = 1") {
    PercolationGraph g = BuildInstance(Params(Dims::Cube(4), 0.75), RunRng(4, 0));
    const std::size_t bonds = g.bonds.size();
    ApplyHeraldedLoss(g, 0.0, RunRng(4, 0));
    CHECK(g.bonds.size() == bonds);
    CHECK(g.RemovedCount() == 0);
    ApplyHeraldedLoss(g, 1.0, RunRng(4, 0));
    CHECK(g.bonds.empty());
    CHECK(g.RemovedCount() == g.sites.size());
  }

  TEST_CASE("heralded removal count is binomial") {
    const Dims d = Dims::Cube(10);
    const double n = 1000, p = 0.1;
    for (std::uint64_t r = 0; r < 20; ++r) {
      const PercolationGraph g =
          BuildInstance(Params(d, 0.75, p, LossMode::kHeralded), RunRng(5, r));
      CHECK(std::abs(static_cast<double>(g.RemovedCount()) - n * p) <=
            4 * std::sqrt(n * p * (1 - p)));
      CHECK(g.Consistent());
    }
  }

  TEST_CASE("bond count does not grow as p decreases") {
    const Dims d{8, 5, 5};
    for (std::uint64_t r = 0; r < 200; ++r) {
      std::size_t prev = SIZE_MAX;
      for (double p : {1.0, 0.9, 0.75, 0.6, 0.4, 0.2, 0.0}) {
        const std::size_t n = BuildInstance(Params(d, p), RunRng(6, r)).bonds.size();
        CHECK(n <= prev);
        prev = n;
      }
    }
  }

  TEST_CASE("instances are consistent under unheralded loss") {
    for (auto remedy : {BondLossRemedy::kCutBoth, BondLossRemedy::kCutLost,
                        BondLossRemedy::kVoidBond}) {
      for (std::uint64_t r = 0; r < 100; ++r) {
        InstanceParams ip = Params({6, 4, 4}, 0.7, 0.05);
        ip.loss.remedy = remedy;
        CHECK(BuildInstance(ip, RunRng(7, r)).Consistent());
      }
    }
  }

  TEST_CASE("construction is reproducible") {
    const InstanceParams ip = Params({7, 5, 4}, 0.7, 0.02);
    for (std::uint64_t r = 0; r < 20; ++r) {
      const PercolationGraph a = BuildInstance(ip, RunRng(8, r));
      const PercolationGraph b = BuildInstance(ip, RunRng(8, r));
      std::ostringstream sa, sb;
      WriteInstance(sa, a);
      WriteInstance(sb, b);
      CHECK(sa.str() == sb.str());
      CHECK(a.sites == b.sites);
    }
  }

  TEST_CASE("instance dump format") {
    const PercolationGraph g = BuildInstance(Params({2, 1, 1}, 1.0), RunRng(1, 0));
    std::ostringstream os;
    WriteInstance(os, g);
    CHECK(os.str() ==
          "dims 2 1 1\n"
          "site 0 0 0 " + std::string(SiteClassName(SiteClass::kFullStar)) + "\n"
          "site 1 0 0 " + std::string(SiteClassName(SiteClass::kFullStar)) + "\n"
          "bond 0 0 0 1 0 0 lattice\n");
  }

  TEST_CASE("loss spec validation") {
    LossSpec l;
    l.p_loss = 1.2;
    CHECK_THROWS_AS(l.Validate(), std::invalid_argument);
    l.p_loss = 0.3;
    l.mode = LossMode::kHeralded;
    CHECK(l.gate_loss() == 0.0);
    for (auto m : {LossMode::kUnheralded, LossMode::kHeralded})
      CHECK(ParseLossMode(LossModeName(m)) == m);
    for (auto r : {BondLossRemedy::kCutBoth, BondLossRemedy::kCutLost, BondLossRemedy::kVoidBond})
      CHECK(ParseRemedy(RemedyName(r)) == r);
  }
}
