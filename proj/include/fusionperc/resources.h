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

#ifndef FUSIONPERC_RESOURCES_H_
#define FUSIONPERC_RESOURCES_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fusionperc/percolation.h"

namespace fusionperc {

/// A computation of n logical qubits and depth k, each renormalized qubit a
/// block of l^3 sites.
struct ComputationShape {
  std::uint64_t n = 1;
  std::uint64_t k = 1;
  std::uint64_t l = 1;

  void Validate() const;
};

struct LatticeCounts {
  std::uint64_t sites = 0;
  std::uint64_t ghz = 0;
  std::uint64_t fusions = 0;
};

/// Optical elements in one boosted fusion gate.
struct OpticalElements {
  int polarization_rotators = 15;
  int polarizing_beamsplitters = 4;
};

LatticeCounts LatticeResources(const ComputationShape& shape);
inline OpticalElements ElementsPerFusion() { return {}; }

/// Probabilistic GHZ source, multiplexed until it fires with
/// `target_confidence`.
struct SourceSpec {
  int ghz_size = 3;
  std::uint64_t bell_pairs_per_attempt = 2;
  double p_attempt = 0.5;
  double target_confidence = 0.999999;

  void Validate() const;
  /// 3-photon GHZ from 2 Bell pairs, success 1/2.
  static SourceSpec Ghz3();
  /// 4-photon GHZ from 3 Bell pairs, success 1/4.
  static SourceSpec Ghz4();
};

enum class CountMode { kFormula, kPaperCompat };

struct Repeats {
  std::uint64_t formula = 0;
  /// Published repeat counts (21 for 3-GHZ, 51 for 4-GHZ sources at the
  /// default settings); nullopt for other sources.
  std::optional<std::uint64_t> paper_compat;
};

/// Smallest t with 1 - (1 - p)^t >= target.
Repeats MultiplexRepeats(const SourceSpec& spec);

/// bell_pairs_per_attempt * repeats. kPaperCompat falls back to the formula
/// when no published count exists for the source.
std::uint64_t BellPairsPerGhz(const SourceSpec& spec, CountMode mode = CountMode::kPaperCompat);

struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// (1/2)^floor((n-1)/2) * (3/4)^ceil((n-1)/2), exact. Throws for n < 2.
Rational GhzSuccessRational(int n);
inline double GhzSuccessProb(int n) { return GhzSuccessRational(n).value(); }

/// One (L, k) point: an L x L lattice of renormalized qubits, each a k^3
/// block.
struct SizePoint {
  int l = 0;
  int k = 0;
};

/// Reads `L,k` rows (header line required). Throws std::runtime_error for
/// a missing, empty or malformed file.
std::vector<SizePoint> ReadSizePoints(const std::string& path);
std::vector<SizePoint> ParseSizePoints(std::istream& in, const std::string& source);

struct ComparisonRow {
  int l = 0;
  int k_ours = 0;
  std::uint64_t bell_ours = 0;
  int k_theirs = 0;
  std::uint64_t bell_theirs = 0;
  double ratio = 0.0;  // bell_theirs / bell_ours
};

/// For each external point, the smallest of our block sizes reaching at
/// least its L. Our cost per site is 3 GHZ-3 states, theirs one GHZ-4 state.
/// External points no block of ours reaches are left out.
std::vector<ComparisonRow> SchemeComparison(const std::vector<SizePoint>& ours,
                                            const std::vector<SizePoint>& theirs,
                                            CountMode mode = CountMode::kPaperCompat);

void WriteComparisonCsv(std::ostream& os, const std::vector<ComparisonRow>& rows);

struct MaxLResult {
  int k = 0;
  int max_l = 0;
  /// True when Pi >= 1/2 still held at the search cap.
  bool capped = false;
  /// Every (L, Pi) evaluated, in evaluation order.
  std::vector<std::pair<int, RunStats>> evaluations;
};

/// Largest number of blocks L such that a line of L blocks of k^3 sites
/// (dims k*L x k x k) spans with Pi >= 1/2. Doubling then bisection,
/// up to `l_cap`.
MaxLResult MaxLAtHalf(int k, const ModelConfig& base, std::uint64_t n_runs, std::uint64_t seed,
                      int l_cap = 1024, const RunOptions& opts = {});

}  // namespace fusionperc

#endif  // FUSIONPERC_RESOURCES_H_
