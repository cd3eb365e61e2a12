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

#include "fusionperc/fusion.h"
#include "fusionperc/rng.h"

using namespace fusionperc;

namespace {

struct Tally {
  int success = 0;
  int failure = 0;
  int loss = 0;
};

Tally Sample(const GateParams& gate, double p_loss, LossScope scope, int n, std::uint64_t seed) {
  Tally t;
  for (int r = 0; r < n; ++r) {
    const RunRng rng(seed, static_cast<std::uint64_t>(r));
    PackedStream outcomes(rng, PackedStream::kFusionOutcomes);
    const FusionResult res = SampleFusion(gate, p_loss, scope, rng, 7, outcomes);
    switch (res.kind) {
      case FusionKind::kSuccess: ++t.success; break;
      case FusionKind::kFailure: ++t.failure; break;
      case FusionKind::kLossDetected: ++t.loss; break;
    }
  }
  return t;
}

bool Within4Sigma(int k, int n, double p) {
  const double sigma = std::sqrt(n * p * (1 - p));
  return std::abs(k - n * p) <= 4 * sigma + 1e-9;
}

}  // namespace

TEST_SUITE("rng") {
  TEST_CASE("Philox4x32-10 known-answer vectors") {
    using C = Philox4x32::Counter;
    CHECK(Philox4x32::Block(C{0, 0, 0, 0}, {0, 0}) ==
          C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::Block(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                            {0xffffffffu, 0xffffffffu}) ==
          C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::Block(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                            {0xa4093822u, 0x299f31d0u}) ==
          C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  }

  TEST_CASE("uniforms lie strictly inside (0, 1)") {
    CHECK(ToUnit(0) > 0.0);
    CHECK(ToUnit(0xffffffffu) < 1.0);
  }

  TEST_CASE("draws are addressed, not sequenced") {
    const RunRng rng(99, 5);
    DrawStream a(rng, 3);
    std::vector<double> seq;
    for (int i = 0; i < 11; ++i) seq.push_back(a.Next());
    for (int i = 0; i < 11; ++i) CHECK(rng.Uniform(3, static_cast<std::uint32_t>(i)) == seq[i]);
    DrawStream b(rng, 3);
    b.Seek(6);
    CHECK(b.Next() == seq[6]);
    PackedStream p(rng, PackedStream::kHeraldedRemoval);
    const double x9 = p.At(9);
    PackedStream q(rng, PackedStream::kHeraldedRemoval);
    CHECK(q.At(0) != x9);
    CHECK(q.At(9) == x9);
    CHECK(RunRng(99, 6).Uniform(3, 0) != seq[0]);
    CHECK(RunRng(98, 5).Uniform(3, 0) != seq[0]);
  }
}

TEST_SUITE("fusion") {
  TEST_CASE("gate parameters") {
    GateParams g;
    CHECK(g.p_success == 0.75);
    CHECK(g.ancilla_photons() == 2);
    g.scheme = GateScheme::kFourSingles;
    CHECK(g.ancilla_photons() == 4);
    g.p_success = 1.5;
    CHECK_THROWS_AS(g.Validate(), std::invalid_argument);
    g.p_success = -0.1;
    CHECK_THROWS_AS(g.Validate(), std::invalid_argument);
  }

  TEST_CASE("photons in scope") {
    GateParams g;
    CHECK(PhotonsInScope(g, LossScope::kDataOnly) == 2);
    CHECK(PhotonsInScope(g, LossScope::kDataAndAncilla) == 4);
    g.scheme = GateScheme::kFourSingles;
    CHECK(PhotonsInScope(g, LossScope::kDataAndAncilla) == 6);
  }

  TEST_CASE("certain success without loss") {
    GateParams g;
    g.p_success = 1.0;
    const Tally t = Sample(g, 0.0, LossScope::kDataAndAncilla, 2000, 1);
    CHECK(t.success == 2000);
  }

  TEST_CASE("certain loss reports both data photons") {
    GateParams g;
    for (int r = 0; r < 100; ++r) {
      const RunRng rng(2, static_cast<std::uint64_t>(r));
      PackedStream outcomes(rng, PackedStream::kFusionOutcomes);
      const FusionResult res = SampleFusion(g, 1.0, LossScope::kDataOnly, rng, 0, outcomes);
      CHECK(res.kind == FusionKind::kLossDetected);
      CHECK(res.lost.Contains(PhotonSet::kData1));
      CHECK(res.lost.Contains(PhotonSet::kData2));
      CHECK_FALSE(res.lost.Contains(PhotonSet::kAncilla0));
    }
  }

  TEST_CASE("lost set is non-empty exactly for loss results") {
    GateParams g;
    for (int r = 0; r < 5000; ++r) {
      const RunRng rng(3, static_cast<std::uint64_t>(r));
      PackedStream outcomes(rng, PackedStream::kFusionOutcomes);
      const FusionResult res =
          SampleFusion(g, 0.2, LossScope::kDataAndAncilla, rng, 0, outcomes);
      CHECK((res.kind == FusionKind::kLossDetected) == !res.lost.empty());
    }
  }

  TEST_CASE("success frequency at 75%") {
    GateParams g;
    const int n = 100000;
    const Tally t = Sample(g, 0.0, LossScope::kDataOnly, n, 4);
    CHECK(t.loss == 0);
    CHECK(Within4Sigma(t.success, n, 0.75));
  }

  TEST_CASE("effective success probability") {
    GateParams g;
    CHECK(EffectiveSuccessProb(g, 0.0, LossScope::kDataAndAncilla) == 0.75);
    CHECK(EffectiveSuccessProb(g, 0.01, LossScope::kDataAndAncilla) ==
          doctest::Approx(0.75 * std::pow(0.99, 4)));
    CHECK(EffectiveSuccessProb(g, 0.01, LossScope::kDataAndAncilla) ==
          doctest::Approx(0.72045).epsilon(1e-4));
    CHECK(EffectiveSuccessProb(g, 0.016, LossScope::kDataOnly) ==
          doctest::Approx(0.72619).epsilon(1e-4));

    const int n = 100000;
    for (auto [p_loss, scope] : {std::pair{0.01, LossScope::kDataAndAncilla},
                                 std::pair{0.016, LossScope::kDataOnly},
                                 std::pair{0.05, LossScope::kDataAndAncilla}}) {
      const Tally t = Sample(g, p_loss, scope, n, 5);
      const double p_s = EffectiveSuccessProb(g, p_loss, scope);
      const double p_l = 1.0 - std::pow(1.0 - p_loss, PhotonsInScope(g, scope));
      CHECK(Within4Sigma(t.success, n, p_s));
      CHECK(Within4Sigma(t.loss, n, p_l));
      CHECK(Within4Sigma(t.failure, n, 1.0 - p_s - p_l));
    }
  }

  TEST_CASE("sampling is a deterministic, coupled function of its draws") {
    GateParams g;
    for (int r = 0; r < 2000; ++r) {
      const RunRng rng(6, static_cast<std::uint64_t>(r));
      PackedStream o1(rng, PackedStream::kFusionOutcomes);
      PackedStream o2(rng, PackedStream::kFusionOutcomes);
      const FusionResult a = SampleFusion(g, 0.1, LossScope::kDataAndAncilla, rng, 9, o1);
      const FusionResult b = SampleFusion(g, 0.1, LossScope::kDataAndAncilla, rng, 9, o2);
      CHECK(a == b);
      // Raising p_success never turns a success into a failure.
      GateParams hi = g;
      hi.p_success = 0.9;
      PackedStream o3(rng, PackedStream::kFusionOutcomes);
      const FusionResult c = SampleFusion(hi, 0.1, LossScope::kDataAndAncilla, rng, 9, o3);
      if (a.kind == FusionKind::kSuccess) CHECK(c.kind == FusionKind::kSuccess);
      // Lowering p_loss never creates a loss.
      PackedStream o4(rng, PackedStream::kFusionOutcomes);
      const FusionResult d = SampleFusion(g, 0.05, LossScope::kDataAndAncilla, rng, 9, o4);
      if (a.kind != FusionKind::kLossDetected) CHECK(d.kind != FusionKind::kLossDetected);
    }
  }
}
