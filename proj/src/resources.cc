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

#include "fusionperc/resources.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fusionperc {

void ComputationShape::Validate() const {
  if (n < 1 || k < 1 || l < 1) {
    throw std::invalid_argument("computation shape: n, k and l must be >= 1");
  }
}

LatticeCounts LatticeResources(const ComputationShape& shape) {
  shape.Validate();
  const std::uint64_t sites = shape.n * shape.k * shape.l * shape.l * shape.l;
  return {sites, 3 * sites, 4 * sites};
}

void SourceSpec::Validate() const {
  if (ghz_size < 2) throw std::invalid_argument("source: ghz_size must be >= 2");
  if (bell_pairs_per_attempt < 1) {
    throw std::invalid_argument("source: bell_pairs_per_attempt must be >= 1");
  }
  if (!(p_attempt > 0.0 && p_attempt <= 1.0)) {
    throw std::invalid_argument("source: p_attempt must be in (0, 1]");
  }
  if (!(target_confidence > 0.0 && target_confidence < 1.0)) {
    throw std::invalid_argument("source: target_confidence must be in (0, 1)");
  }
}

SourceSpec SourceSpec::Ghz3() { return {3, 2, 0.5, 0.999999}; }
SourceSpec SourceSpec::Ghz4() { return {4, 3, 0.25, 0.999999}; }

namespace {

bool SameSource(const SourceSpec& a, const SourceSpec& b) {
  return a.ghz_size == b.ghz_size && a.bell_pairs_per_attempt == b.bell_pairs_per_attempt &&
         a.p_attempt == b.p_attempt && a.target_confidence == b.target_confidence;
}

}  // namespace

Repeats MultiplexRepeats(const SourceSpec& spec) {
  spec.Validate();
  Repeats r;
  const double miss = 1.0 - spec.p_attempt;
  double all_missed = 1.0;
  std::uint64_t t = 0;
  do {
    ++t;
    all_missed *= miss;
  } while (1.0 - all_missed < spec.target_confidence);
  r.formula = t;
  // The published counts are one and two above the formula; they are
  // kept as given.
  if (SameSource(spec, SourceSpec::Ghz3())) r.paper_compat = 21;
  if (SameSource(spec, SourceSpec::Ghz4())) r.paper_compat = 51;
  return r;
}

std::uint64_t BellPairsPerGhz(const SourceSpec& spec, CountMode mode) {
  const Repeats r = MultiplexRepeats(spec);
  const std::uint64_t t =
      mode == CountMode::kPaperCompat && r.paper_compat ? *r.paper_compat : r.formula;
  return spec.bell_pairs_per_attempt * t;
}

Rational GhzSuccessRational(int n) {
  if (n < 2) throw std::invalid_argument("GHZ size must be >= 2");
  const int halves = (n - 1) / 2;
  const int quarters = n / 2;  // ceil((n - 1) / 2)
  Rational r{1, 1};
  for (int i = 0; i < halves; ++i) r.den *= 2;
  for (int i = 0; i < quarters; ++i) {
    r.num *= 3;
    r.den *= 4;
  }
  return r;
}

std::vector<SizePoint> ParseSizePoints(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(source + ": empty file");
  auto trim = [](std::string s) {
    s.erase(0, s.find_first_not_of(" \t\r"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    return s;
  };
  const std::string header = trim(line);
  if (header != "L,k") {
    throw std::runtime_error(source + ": expected header 'L,k', got '" + header + "'");
  }
  std::vector<SizePoint> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    SizePoint p;
    auto parse = [&](std::string_view text, int& value) {
      const std::string t = trim(std::string(text));
      const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
      return ec == std::errc() && ptr == t.data() + t.size() && value >= 1;
    };
    if (comma == std::string::npos ||
        !parse(std::string_view(line).substr(0, comma), p.l) ||
        !parse(std::string_view(line).substr(comma + 1), p.k)) {
      throw std::runtime_error(source + ":" + std::to_string(line_no) +
                               ": expected two positive integers 'L,k'");
    }
    out.push_back(p);
  }
  if (out.empty()) throw std::runtime_error(source + ": no data rows");
  return out;
}

std::vector<SizePoint> ReadSizePoints(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  return ParseSizePoints(in, path);
}

std::vector<ComparisonRow> SchemeComparison(const std::vector<SizePoint>& ours,
                                            const std::vector<SizePoint>& theirs,
                                            CountMode mode) {
  const std::uint64_t per_ghz3 = BellPairsPerGhz(SourceSpec::Ghz3(), mode);
  const std::uint64_t per_ghz4 = BellPairsPerGhz(SourceSpec::Ghz4(), mode);
  auto cube = [](std::uint64_t k) { return k * k * k; };
  std::vector<ComparisonRow> rows;
  for (const SizePoint& t : theirs) {
    std::optional<int> k_ours;
    for (const SizePoint& o : ours) {
      if (o.l >= t.l && (!k_ours || o.k < *k_ours)) k_ours = o.k;
    }
    if (!k_ours) continue;
    const auto l2 = static_cast<std::uint64_t>(t.l) * static_cast<std::uint64_t>(t.l);
    ComparisonRow row;
    row.l = t.l;
    row.k_ours = *k_ours;
    row.k_theirs = t.k;
    row.bell_ours = per_ghz3 * 3 * l2 * cube(static_cast<std::uint64_t>(*k_ours));
    row.bell_theirs = per_ghz4 * l2 * cube(static_cast<std::uint64_t>(t.k));
    row.ratio = static_cast<double>(row.bell_theirs) / static_cast<double>(row.bell_ours);
    rows.push_back(row);
  }
  return rows;
}

void WriteComparisonCsv(std::ostream& os, const std::vector<ComparisonRow>& rows) {
  os << "L,k_ours,bell_ours,k_theirs,bell_theirs,ratio\n";
  for (const ComparisonRow& r : rows) {
    std::ostringstream ratio;
    ratio.precision(6);
    ratio << r.ratio;
    os << r.l << ',' << r.k_ours << ',' << r.bell_ours << ',' << r.k_theirs << ','
       << r.bell_theirs << ',' << ratio.str() << '\n';
  }
}

MaxLResult MaxLAtHalf(int k, const ModelConfig& base, std::uint64_t n_runs, std::uint64_t seed,
                      int l_cap, const RunOptions& opts) {
  if (k < 2) throw std::invalid_argument("block size k must be >= 2");
  if (l_cap < 1) throw std::invalid_argument("l_cap must be >= 1");
  MaxLResult result;
  result.k = k;
  auto holds = [&](int l) {
    ModelConfig cfg = base;
    cfg.instance.dims = {k * l, k, k};
    const RunStats s = EstimatePi(cfg, n_runs, seed, opts);
    result.evaluations.emplace_back(l, s);
    return s.pi >= 0.5;
  };
  if (!holds(1)) return result;
  int good = 1;
  int bad = 0;
  while (bad == 0) {
    const int next = std::min(2 * good, l_cap);
    if (next == good) {
      result.capped = true;
      result.max_l = good;
      return result;
    }
    if (holds(next)) {
      good = next;
    } else {
      bad = next;
    }
  }
  while (bad - good > 1) {
    const int mid = good + (bad - good) / 2;
    if (holds(mid)) {
      good = mid;
    } else {
      bad = mid;
    }
  }
  result.max_l = good;
  return result;
}

}  // namespace fusionperc
