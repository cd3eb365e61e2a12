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

// Acceptance checks. `acceptance [N ...]` runs the listed criteria (all by
// default) and prints one PASS/FAIL line for each; the exit status is
// nonzero if any of them failed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "experiment.h"
#include "fusionperc/oracle_check.h"
#include "fusionperc/percolation.h"
#include "fusionperc/resources.h"

using namespace fusionperc;

namespace {

constexpr std::uint64_t kSeed = 20260101;
constexpr std::uint64_t kRuns = 10000;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

cli::ExperimentConfig Defaults(const std::string& command) {
  return cli::ParseConfig({{"command", command}, {"seed", kSeed}, {"n_runs", kRuns}});
}

RunOptions Opts() {
  RunOptions o;
  o.workers = cli::ResolveWorkers(0);
  o.log = [](const std::string& s) { std::cerr << s << '\n'; };
  return o;
}

ThresholdEstimate Threshold(const cli::ExperimentConfig& c, std::string* detail) {
  const ThresholdData data = SweepThreshold(c.Model(), c.sizes, c.p_grid, c.n_runs, c.seed, Opts());
  const ThresholdEstimate t = EstimateThreshold(data.curves);
  std::ostringstream os;
  os << "p_c=" << Fmt("%.4f", t.p_c) << " spread=" << Fmt("%.4f", t.spread) << " crossings=";
  for (const auto& x : t.crossings) os << "(" << x.l1 << "," << x.l2 << ")" << Fmt("%.4f", x.value()) << " ";
  *detail = os.str();
  return t;
}

Verdict Criterion1() {
  Verdict v;
  try {
    const ThresholdEstimate t = Threshold(Defaults("threshold"), &v.detail);
    v.pass = std::abs(t.p_c - 0.625) <= 0.02 && t.spread <= 0.02;
  } catch (const std::exception& e) {
    v.detail = std::string("threshold fit failed: ") + e.what();
  }
  return v;
}

Verdict Criterion2() {
  Verdict v{true, ""};
  for (int l : {15, 20, 25}) {
    ModelConfig m = Defaults("pi").Model();
    m.instance.dims = Dims::Cube(l);
    const RunStats s = EstimatePi(m, kRuns, kSeed, Opts());
    v.pass = v.pass && s.pi >= 0.99;
    v.detail += "L=" + std::to_string(l) + " pi=" + Fmt("%.4f", s.pi) + " ";
  }
  return v;
}

// Largest p_loss with Pi >= 0.9 at L = 25.
std::optional<double> Tolerance(const cli::ExperimentConfig& c, std::string* detail) {
  const LossSweepResult r =
      LossSweep(c.Model(), c.sizes.front(), c.p_loss_grid, c.n_runs, c.seed, Opts());
  *detail += std::string(LossModeName(c.loss.mode));
  if (c.loss.mode == LossMode::kUnheralded) *detail += " " + std::string(ScopeName(c.loss.scope));
  *detail += ": tolerance=";
  *detail += r.tolerance ? Fmt("%.4f", *r.tolerance) : std::string("none");
  *detail += r.bracketed ? " " : " (not bracketed) ";
  return r.bracketed ? r.tolerance : std::nullopt;
}

Verdict Criterion3() {
  Verdict v;
  const cli::ExperimentConfig c = Defaults("loss");
  const auto t = Tolerance(c, &v.detail);
  v.pass = t && *t >= 0.010 && *t <= 0.022;
  return v;
}

Verdict Criterion4() {
  Verdict v;
  const cli::ExperimentConfig c = Defaults("heralded");
  const auto t = Tolerance(c, &v.detail);
  v.pass = t && *t >= 0.12 && *t <= 0.18;
  return v;
}

Verdict Criterion5() {
  Verdict v;
  const cli::ExperimentConfig c = Defaults("channel");
  std::map<int, FitResult> fits;
  bool all_fit = true;
  for (int l : c.cross_sections) {
    const ChannelResult r = ChannelSweep(c.Model(), l, c.lengths, c.n_runs, c.seed, Opts());
    if (r.fit) {
      fits[l] = *r.fit;
      v.detail += "lambda(" + std::to_string(l) + ")=" + Fmt("%.2f", r.fit->decay_length) + " ";
    } else {
      all_fit = false;
      v.detail += "L=" + std::to_string(l) + " fit failed: " + r.fit_error + " ";
    }
  }
  if (!all_fit || !fits.count(4) || !fits.count(6)) return v;
  bool increasing = true;
  for (auto it = std::next(fits.begin()); it != fits.end(); ++it)
    increasing = increasing && it->second.decay_length > std::prev(it)->second.decay_length;
  const double ratio = fits[6].decay_length / fits[4].decay_length;
  const double quadratic = (6.0 / 4.0) * (6.0 / 4.0);
  const double len90 = fits[6].LengthAt(0.9);
  v.detail += "increasing=" + std::string(increasing ? "yes" : "no");
  v.detail += " ratio=" + Fmt("%.2f", ratio) + " (quadratic 2.25, accepted [1.125, 4.5])";
  v.detail += " L=6 length at Pi=0.9: " + Fmt("%.1f", len90) + " sites (need >= 1000)";
  v.detail += ", " + Fmt("%.1f", len90 / 6) + " k=6 blocks vs 1500";
  v.detail += ", " + Fmt("%.0f", len90 * 36) + " sites in the channel vs 9000 qubits";
  v.pass = increasing && ratio >= quadratic / 2 && ratio <= quadratic * 2 && len90 >= 1000;
  return v;
}

Verdict Criterion6() {
  Verdict v;
  try {
    const ThresholdEstimate t = Threshold(Defaults("calibrate"), &v.detail);
    v.pass = std::abs(t.p_c - 0.2488) <= 0.005;
  } catch (const std::exception& e) {
    v.detail = std::string("calibration fit failed: ") + e.what();
  }
  return v;
}

Verdict Criterion7() {
  Verdict v{true, ""};
  const auto start = std::chrono::steady_clock::now();
  for (const SuiteReport& r : RunAllSuites()) {
    v.pass = v.pass && r.passed();
    v.detail += r.name + " " + std::to_string(r.cases - r.failures) + "/" +
                std::to_string(r.cases) + " ";
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.detail += Fmt("in %.1f s", secs);
  v.pass = v.pass && secs <= 60.0;
  return v;
}

Verdict Criterion8() {
  const LatticeCounts c = LatticeResources({1, 1, 6});
  const std::uint64_t b3 = BellPairsPerGhz(SourceSpec::Ghz3(), CountMode::kPaperCompat);
  const std::uint64_t b4 = BellPairsPerGhz(SourceSpec::Ghz4(), CountMode::kPaperCompat);
  const Rational g3 = GhzSuccessRational(3);
  const Rational g5 = GhzSuccessRational(5);
  Verdict v;
  v.pass = c.sites == 216 && c.ghz == 648 && c.fusions == 864 && b3 == 42 && b4 == 153 &&
           g3 == Rational{3, 8} && g5 == Rational{9, 64} && GhzSuccessProb(3) == 0.375 &&
           GhzSuccessProb(5) == 0.140625 && ElementsPerFusion().polarization_rotators == 15 &&
           ElementsPerFusion().polarizing_beamsplitters == 4;
  std::ostringstream os;
  os << "sites/ghz/fusions(L=6)=" << c.sites << "/" << c.ghz << "/" << c.fusions
     << " bell=" << b3 << "," << b4 << " ghz3=" << g3.num << "/" << g3.den
     << " ghz5=" << g5.num << "/" << g5.den;
  v.detail = os.str();
  return v;
}

Verdict Criterion9() {
  // L = 15 near its Pi = 1/2 point.
  ModelConfig m = Defaults("pi").Model();
  m.instance.dims = Dims::Cube(15);
  m.instance.gate.p_success = 0.636;
  RunOptions one = Opts();
  one.workers = 1;
  RunOptions many = Opts();
  many.workers = 4;
  const RunStats a = EstimatePi(m, kRuns, kSeed, one);
  const RunStats b = EstimatePi(m, kRuns, kSeed, many);
  const double half = (a.ci95.hi - a.ci95.lo) / 2;
  const bool same = cli::PiCsvRow(m, a) == cli::PiCsvRow(m, b);
  Verdict v;
  v.pass = half <= 0.01 && a.pi > 0.3 && a.pi < 0.7 && same;
  v.detail = "pi=" + Fmt("%.4f", a.pi) + " ci half-width=" + Fmt("%.4f", half) +
             " rows identical for 1 and 4 workers: " + (same ? "yes" : "no");
  return v;
}

const std::map<int, std::pair<std::string, std::function<Verdict()>>>& Criteria() {
  static const std::map<int, std::pair<std::string, std::function<Verdict()>>> c{
      {1, {"threshold", Criterion1}},
      {2, {"above-threshold operation", Criterion2}},
      {3, {"unheralded loss tolerance", Criterion3}},
      {4, {"heralded loss tolerance", Criterion4}},
      {5, {"channel decay", Criterion5}},
      {6, {"cubic bond calibration", Criterion6}},
      {7, {"rule/oracle equivalence", Criterion7}},
      {8, {"resource identities", Criterion8}},
      {9, {"statistical hygiene", Criterion9}},
  };
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty()) {
    for (const auto& [n, _] : Criteria()) which.push_back(n);
  }
  bool all = true;
  for (int n : which) {
    const auto it = Criteria().find(n);
    if (it == Criteria().end()) {
      std::cerr << "unknown criterion " << n << '\n';
      return 2;
    }
    const auto start = std::chrono::steady_clock::now();
    const Verdict v = it->second.second();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << n << " (" << it->second.first << "): "
              << (v.pass ? "PASS" : "FAIL") << ": " << v.detail << Fmt(" [%.0f s]", secs)
              << std::endl;
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
