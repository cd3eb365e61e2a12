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

// Fast lattice rules against the stabilizer tableau.

#include <doctest.h>

#include "fusionperc/oracle_check.h"

using namespace fusionperc;

namespace {

void Expect(const SuiteReport& r) {
  for (const auto& e : r.examples) MESSAGE(e.description << "\n" << e.fragment);
  MESSAGE(r.name << ": " << r.cases << " cases");
  CHECK(r.cases > 0);
  CHECK(r.failures == 0);
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("single site, every internal outcome pair") { Expect(SingleSiteSuite()); }
  TEST_CASE("two sites, every bond and internal outcome") { Expect(TwoSiteSuite()); }
  TEST_CASE("diagonal bonds through detached pairs") { Expect(DiagonalSuite()); }
  TEST_CASE("random lossy lattices") { Expect(RandomLatticeSuite(1, 40)); }

  TEST_CASE("suite sizes") {
    CHECK(InternalOutcomeSet().size() == 6);
    CHECK(BondOutcomeSet().size() == 5);
    CHECK(SingleSiteSuite().cases == 2 * 3 * 36);
  }
}
