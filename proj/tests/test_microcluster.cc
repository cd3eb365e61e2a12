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

#include <cmath>
#include <stdexcept>
#include <map>

#include "fusionperc/microcluster.h"
#include "fusionperc/oracle_check.h"
#include "fusionperc/percolation.h"

using namespace fusionperc;

namespace {

const FusionResult S = FusionResult::Success();
const FusionResult F = FusionResult::Failure();

FusionResult Lost(std::initializer_list<PhotonSet::Role> roles) {
  PhotonSet p;
  for (auto r : roles) p.Add(r);
  return FusionResult::Loss(p);
}

bool Within4Sigma(double k, double n, double p) {
  return std::abs(k - n * p) <= 4 * std::sqrt(n * p * (1 - p)) + 1e-9;
}

}  // namespace

TEST_SUITE("microcluster") {
  TEST_CASE("slots and assignments") {
    for (ArmSlot s : kAllSlots) CHECK(ParseSlot(SlotName(s)) == s);
    CHECK_FALSE(ParseSlot("Y").has_value());
    const ArmAssignment d = DefaultAssignment();
    CHECK(d.Valid());
    CHECK(d.side1 == std::array<ArmSlot, 2>{ArmSlot::kMinusX, ArmSlot::kT1});
    CHECK(d.side2 == std::array<ArmSlot, 2>{ArmSlot::kPlusX, ArmSlot::kT2});
    ArmAssignment bad;
    bad.side2 = {ArmSlot::kMinusX, ArmSlot::kT2};
    CHECK_FALSE(bad.Valid());
    const auto all = AllPairings();
    CHECK(all[0] == d);
    for (const auto& a : all) CHECK(a.Valid());
    CHECK_FALSE(all[0] == all[1]);
    CHECK_FALSE(all[1] == all[2]);
    CHECK_FALSE(all[0] == all[2]);
  }

  TEST_CASE("both internal fusions succeed: full star") {
    const SiteOutcome o = SiteOutcomeFrom(S, S, DefaultAssignment());
    CHECK(o.full_success());
    CHECK(o.Class() == SiteClass::kFullStar);
    CHECK(o.detached_pairs().empty());
  }

  TEST_CASE("one failure detaches that side's arms") {
    const ArmAssignment a = DefaultAssignment();
    const SiteOutcome o = SiteOutcomeFrom(S, F, a);
    CHECK(o.Class() == SiteClass::kOneDetached);
    CHECK(o.attached(ArmSlot::kMinusX));
    CHECK(o.attached(ArmSlot::kT1));
    CHECK(o.partner(ArmSlot::kPlusX) == ArmSlot::kT2);
    CHECK(o.partner(ArmSlot::kT2) == ArmSlot::kPlusX);
    // A single failure on side 1 leaves +X attached.
    CHECK(SiteOutcomeFrom(F, S, a).attached(ArmSlot::kPlusX));
  }

  TEST_CASE("two failures: isolated center and two detached pairs") {
    const SiteOutcome o = SiteOutcomeFrom(F, F, DefaultAssignment());
    CHECK(o.center_alive());
    CHECK(o.attached_count() == 0);
    CHECK(o.detached_pairs().size() == 2);
    CHECK(o.Class() == SiteClass::kTwoDetached);
  }

  TEST_CASE("losses") {
    const ArmAssignment a = DefaultAssignment();
    const SiteOutcome leaf_lost = SiteOutcomeFrom(Lost({PhotonSet::kData1}), S, a);
    CHECK_FALSE(leaf_lost.center_alive());
    CHECK(leaf_lost.attached_count() == 0);
    CHECK(leaf_lost.Class() == SiteClass::kCenterDead);

    const SiteOutcome side_lost = SiteOutcomeFrom(Lost({PhotonSet::kData2}), S, a);
    CHECK(side_lost.center_alive());
    CHECK(side_lost.dead(ArmSlot::kMinusX));
    CHECK(side_lost.dead(ArmSlot::kT1));
    CHECK(side_lost.attached(ArmSlot::kPlusX));
    CHECK(side_lost.Class() == SiteClass::kPartial);

    const SiteOutcome ancilla_lost = SiteOutcomeFrom(S, Lost({PhotonSet::kAncilla0}), a);
    CHECK(ancilla_lost.center_alive());
    CHECK(ancilla_lost.dead(ArmSlot::kPlusX));
    CHECK(ancilla_lost.attached(ArmSlot::kMinusX));
  }

  TEST_CASE("every outcome partitions the slots") {
    for (const auto& a : AllPairings()) {
      for (auto rule : {InternalFailureRule::kDetachPair, InternalFailureRule::kDisconnect}) {
        for (const auto& r1 : InternalOutcomeSet()) {
          for (const auto& r2 : InternalOutcomeSet()) {
            const SiteOutcome o = SiteOutcomeFrom(r1, r2, a, rule);
            CHECK(o.Consistent());
            int total = o.attached_count() + static_cast<int>(o.dead_arms().size()) +
                        2 * static_cast<int>(o.detached_pairs().size());
            CHECK(total == 4);
            CHECK(o.full_success() == (o.center_alive() && o.attached_count() == 4));
            if (!o.center_alive()) CHECK(o.attached_count() == 0);
          }
        }
      }
    }
  }

  TEST_CASE("failure rule follows the internal failure basis") {
    CHECK(SiteRuleFor(FusionBasis::Rotated()) == InternalFailureRule::kDetachPair);
    CHECK(SiteRuleFor({FusionMode::kRotated, Pauli::kZ, Pauli::kZ}) ==
          InternalFailureRule::kDisconnect);
    CHECK_FALSE(SiteRuleFor({FusionMode::kRotated, Pauli::kY, Pauli::kY}).has_value());
    const SiteOutcome o =
        SiteOutcomeFrom(S, F, DefaultAssignment(), InternalFailureRule::kDisconnect);
    CHECK(o.center_alive());
    CHECK(o.attached_count() == 0);
    CHECK(o.detached_pairs().empty());
  }

  TEST_CASE("site outcomes match the tableau on the explicit 9-qubit fragment") {
    const SuiteReport r = SingleSiteSuite();
    for (const auto& e : r.examples) MESSAGE(e.description);
    CHECK(r.cases == 2 * 3 * 36);
    CHECK(r.failures == 0);
  }

  TEST_CASE("outcome distribution") {
    GateParams g;
    g.p_success = 1.0;
    CHECK(OutcomeDistribution(g)[SiteClass::kFullStar] == 1.0);
    g.p_success = 0.75;
    auto d = OutcomeDistribution(g);
    CHECK(d[SiteClass::kFullStar] == doctest::Approx(0.5625));
    CHECK(d[SiteClass::kOneDetached] == doctest::Approx(0.375));
    CHECK(d[SiteClass::kTwoDetached] == doctest::Approx(0.0625));
    g.p_success = 0.5;
    d = OutcomeDistribution(g);
    CHECK(d[SiteClass::kFullStar] == doctest::Approx(0.25));
    CHECK(d[SiteClass::kOneDetached] == doctest::Approx(0.5));
    CHECK(d[SiteClass::kTwoDetached] == doctest::Approx(0.25));
    CHECK_THROWS_AS(OutcomeDistribution(g, 0.01), std::invalid_argument);
  }

  TEST_CASE("sampled class frequencies match the distribution") {
    GateParams g;
    const int n = 100000;
    std::map<SiteClass, int> counts;
    for (int r = 0; r < n; ++r) {
      const RunRng rng(17, static_cast<std::uint64_t>(r));
      ++counts[BuildSite(g, 0.0, LossScope::kDataAndAncilla, DefaultAssignment(), rng,
                         static_cast<std::uint32_t>(r % 50))
                   .Class()];
    }
    for (const auto& [cls, p] : OutcomeDistribution(g)) {
      CAPTURE(SiteClassName(cls));
      CHECK(Within4Sigma(counts[cls], n, p));
    }
  }

  TEST_CASE("arm pairing sweep at p = 0.75, L = 10") {
    std::vector<double> pi;
    for (const auto& a : AllPairings()) {
      ModelConfig cfg;
      cfg.instance.dims = Dims::Cube(10);
      cfg.instance.assignment = a;
      pi.push_back(EstimatePi(cfg, 2000, 2024).pi);
      MESSAGE(a.ToString() << " pi=" << pi.back());
    }
    CHECK(pi[0] >= pi[1]);
    CHECK(pi[0] >= pi[2]);
  }
}
