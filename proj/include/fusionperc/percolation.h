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

#ifndef FUSIONPERC_PERCOLATION_H_
#define FUSIONPERC_PERCOLATION_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fusionperc/lattice.h"
#include "fusionperc/union_find.h"

namespace fusionperc {

/// Thrown when a fit does not converge or its input cannot support it.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// True iff some bond path joins the x = 0 face to the x = lx-1 face.
/// lx = 1 always spans.
bool Spans(const PercolationGraph& g);
bool Spans(const PercolationGraph& g, UnionFind& uf);
/// Breadth-first reference implementation of Spans.
bool SpansBfs(const PercolationGraph& g);

/// kCubicBond: plain simple-cubic lattice, each nearest-neighbor bond open
/// independently with probability gate.p_success. Used to check the
/// estimators against a model with a well-known threshold.
enum class LatticeModel { kMicrocluster, kCubicBond };

struct ModelConfig {
  InstanceParams instance;
  LatticeModel model = LatticeModel::kMicrocluster;

  void Validate() const;
  /// Stable text form of every parameter; hashed into RunStats.
  std::string Canonical() const;
};

/// Spanning test for one run of the plain cubic model.
bool CubicBondSpans(const Dims& d, double p, const RunRng& rng, UnionFind& uf);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for k successes in n trials.
Interval WilsonInterval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054);

struct RunStats {
  std::uint64_t n_runs = 0;
  std::uint64_t n_spanning = 0;
  double pi = 0.0;
  Interval ci95;
  std::uint64_t seed = 0;
  std::uint64_t fingerprint = 0;
};

RunStats MakeStats(std::uint64_t n_spanning, std::uint64_t n_runs, std::uint64_t seed,
                   std::uint64_t fingerprint);

/// FNV-1a 64-bit.
std::uint64_t Fingerprint(const std::string& s);

struct RunOptions {
  int workers = 1;
  /// Progress sink; may be empty.
  std::function<void(const std::string&)> log;
};

/// Runs `n_runs` instances; run r uses RunRng(seed, r). Counts are summed,
/// so the result does not depend on the worker count.
RunStats EstimatePi(const ModelConfig& cfg, std::uint64_t n_runs, std::uint64_t seed,
                    const RunOptions& opts = {});

/// Runs `n_runs` calls of trial(run_index) on a pool of workers and counts
/// true results. `make_trial` is called once per worker.
std::uint64_t CountParallel(
    std::uint64_t n_runs, int workers,
    const std::function<std::function<bool(std::uint64_t)>()>& make_trial);

/// Logistic model Pi(p) = 1 / (1 + exp(-(a + b p))).
struct LogisticFit {
  double a = 0.0;
  double b = 0.0;
  bool converged = false;
  int iterations = 0;

  double location() const { return -a / b; }
  double width() const { return 1.0 / b; }
  double operator()(double p) const;
};

struct CurvePoint {
  double x = 0.0;
  std::uint64_t k = 0;
  std::uint64_t n = 0;
  double pi() const { return n ? static_cast<double>(k) / static_cast<double>(n) : 0.0; }
};

/// Binomial maximum-likelihood logistic fit (Newton's method). Throws
/// FitError on divergence or fewer than two distinct x values.
LogisticFit FitLogistic(const std::vector<CurvePoint>& points);

struct Crossing {
  int l1 = 0;
  int l2 = 0;
  /// Intersection of the two logistic fits (nullopt if outside the grid).
  std::optional<double> logistic;
  /// Intersection of piecewise-linear interpolants (nullopt if none).
  std::optional<double> linear;
  double value() const { return logistic ? *logistic : *linear; }
};

struct ThresholdEstimate {
  double p_c = 0.0;
  double spread = 0.0;
  std::vector<Crossing> crossings;
  std::vector<std::pair<int, LogisticFit>> fits;
  /// Mean of the linear-interpolation crossings, when all exist.
  std::optional<double> p_c_linear;
};

struct SizeCurve {
  int l = 0;
  std::vector<CurvePoint> points;  // sorted by x
};

/// Crossing-point estimate from per-size curves. p_c is the mean of the
/// pairwise crossings (logistic, falling back to linear per pair). Throws
/// std::invalid_argument for duplicate sizes, fewer than two sizes, or
/// fewer than 5 grid points, and FitError when a curve does not straddle
/// 1/2 or a pair has no crossing.
ThresholdEstimate EstimateThreshold(const std::vector<SizeCurve>& curves);

struct ThresholdData {
  std::vector<SizeCurve> curves;
  std::vector<std::vector<RunStats>> stats;  // [size][grid point]
};

/// Runs cubic lattices of each size over the p grid.
ThresholdData SweepThreshold(const ModelConfig& base, const std::vector<int>& sizes,
                             const std::vector<double>& p_grid, std::uint64_t n_runs,
                             std::uint64_t seed, const RunOptions& opts = {});

struct FitResult {
  double amplitude = 0.0;
  double decay_length = 0.0;
  double residual = 0.0;
  int points_used = 0;
  bool converged = false;

  /// Length at which the fitted curve equals `level`.
  double LengthAt(double level) const;
};

/// Least-squares fit of Pi = A exp(-x / lambda) over points with Pi < tail
/// (Gauss-Newton from a log-linear start). Throws FitError with fewer than
/// 3 tail points or a non-positive decay length.
FitResult FitExponential(const std::vector<double>& x, const std::vector<double>& pi,
                         double tail = 0.99);

struct ChannelResult {
  int cross_section = 0;
  std::vector<int> lengths;
  std::vector<RunStats> stats;
  std::optional<FitResult> fit;
  std::string fit_error;
};

/// Channels of dims (length, L, L).
ChannelResult ChannelSweep(const ModelConfig& base, int cross_section,
                           const std::vector<int>& lengths, std::uint64_t n_runs,
                           std::uint64_t seed, const RunOptions& opts = {});

struct LossSweepResult {
  std::vector<double> p_loss;
  std::vector<RunStats> stats;
  /// Largest p_loss with Pi >= level, interpolated; nullopt if the first
  /// point is already below the level.
  std::optional<double> tolerance;
  bool bracketed = false;
};

/// Linear-interpolated crossing of `level` on a decreasing curve.
std::optional<double> ToleranceAt(const std::vector<double>& x, const std::vector<double>& y,
                                  double level, bool* bracketed = nullptr);

/// Cubic lattice of side L; loss mode and scope come from `base`.
LossSweepResult LossSweep(const ModelConfig& base, int l, const std::vector<double>& p_loss_grid,
                          std::uint64_t n_runs, std::uint64_t seed, const RunOptions& opts = {});

struct RenormResult {
  int block = 0;
  std::vector<int> n_blocks;
  std::vector<RunStats> stats;
  std::optional<FitResult> fit;  // in units of blocks
  std::string fit_error;
};

/// Channels of dims (k * n_blocks, k, k).
RenormResult RenormalizedChannel(const ModelConfig& base, int k,
                                 const std::vector<int>& n_blocks, std::uint64_t n_runs,
                                 std::uint64_t seed, const RunOptions& opts = {});

}  // namespace fusionperc

#endif  // FUSIONPERC_PERCOLATION_H_
