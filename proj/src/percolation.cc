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

#include "fusionperc/percolation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>
#include <thread>

namespace fusionperc {

bool Spans(const PercolationGraph& g, UnionFind& uf) {
  const Dims& d = g.dims;
  if (d.lx == 1) return true;
  const auto n = static_cast<std::uint32_t>(g.sites.size());
  const std::uint32_t source = n;
  const std::uint32_t sink = n + 1;
  uf.Reset(n + 2);
  for (const Bond& b : g.bonds) uf.Union(b.a, b.b);
  const auto lx = static_cast<std::uint32_t>(d.lx);
  for (std::uint32_t row = 0; row < n; row += lx) {
    uf.Union(source, row);
    uf.Union(sink, row + lx - 1);
  }
  return uf.Connected(source, sink);
}

bool Spans(const PercolationGraph& g) {
  UnionFind uf;
  return Spans(g, uf);
}

bool SpansBfs(const PercolationGraph& g) {
  const Dims& d = g.dims;
  if (d.lx == 1) return true;
  const std::size_t n = g.sites.size();
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (const Bond& b : g.bonds) {
    adj[b.a].push_back(b.b);
    adj[b.b].push_back(b.a);
  }
  std::vector<char> seen(n, 0);
  std::deque<std::uint32_t> queue;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (CoordOf(s, d).x == 0) {
      seen[s] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const std::uint32_t s = queue.front();
    queue.pop_front();
    if (CoordOf(s, d).x == d.lx - 1) return true;
    for (std::uint32_t t : adj[s]) {
      if (!seen[t]) {
        seen[t] = 1;
        queue.push_back(t);
      }
    }
  }
  return false;
}

void ModelConfig::Validate() const {
  if (model == LatticeModel::kCubicBond) {
    instance.dims.Validate();
    instance.gate.Validate();
    return;
  }
  instance.Validate();
}

std::string ModelConfig::Canonical() const {
  const InstanceParams& i = instance;
  std::ostringstream os;
  os.precision(17);
  os << "model=" << (model == LatticeModel::kMicrocluster ? "microcluster" : "cubic_bond")
     << ";dims=" << i.dims.lx << ',' << i.dims.ly << ',' << i.dims.lz
     << ";p=" << i.gate.p_success
     << ";scheme=" << (i.gate.scheme == GateScheme::kBellAncilla ? "bell_ancilla" : "four_singles")
     << ";failure=" << (i.gate.failure_basis.mode == FusionMode::kRotated ? "rotated" : "standard")
     << PauliChar(i.gate.failure_basis.first) << PauliChar(i.gate.failure_basis.second)
     << ";p_loss=" << i.loss.p_loss << ";scope=" << ScopeName(i.loss.scope)
     << ";mode=" << LossModeName(i.loss.mode) << ";remedy=" << RemedyName(i.loss.remedy)
     << ";assignment=" << i.assignment.ToString();
  return os.str();
}

bool CubicBondSpans(const Dims& d, double p, const RunRng& rng, UnionFind& uf) {
  if (d.lx == 1) return true;
  const auto n = static_cast<std::uint32_t>(d.site_count());
  const auto lx = static_cast<std::uint32_t>(d.lx);
  const auto lxy = static_cast<std::uint32_t>(d.lx * d.ly);
  uf.Reset(n + 2);
  PackedStream draws(rng, PackedStream::kCubicBonds);
  for (std::uint32_t z = 0, s = 0; z < static_cast<std::uint32_t>(d.lz); ++z) {
    for (std::uint32_t y = 0; y < static_cast<std::uint32_t>(d.ly); ++y) {
      for (std::uint32_t x = 0; x < lx; ++x, ++s) {
        if (x + 1 < lx && draws.At(3 * s) < p) uf.Union(s, s + 1);
        if (y + 1 < static_cast<std::uint32_t>(d.ly) && draws.At(3 * s + 1) < p) {
          uf.Union(s, s + lx);
        }
        if (z + 1 < static_cast<std::uint32_t>(d.lz) && draws.At(3 * s + 2) < p) {
          uf.Union(s, s + lxy);
        }
      }
    }
  }
  for (std::uint32_t row = 0; row < n; row += lx) {
    uf.Union(n, row);
    uf.Union(n + 1, row + lx - 1);
  }
  return uf.Connected(n, n + 1);
}

Interval WilsonInterval(std::uint64_t k, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

RunStats MakeStats(std::uint64_t n_spanning, std::uint64_t n_runs, std::uint64_t seed,
                   std::uint64_t fingerprint) {
  RunStats r;
  r.n_runs = n_runs;
  r.n_spanning = n_spanning;
  r.pi = n_runs ? static_cast<double>(n_spanning) / static_cast<double>(n_runs) : 0.0;
  r.ci95 = WilsonInterval(n_spanning, n_runs);
  r.seed = seed;
  r.fingerprint = fingerprint;
  return r;
}

std::uint64_t Fingerprint(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t CountParallel(
    std::uint64_t n_runs, int workers,
    const std::function<std::function<bool(std::uint64_t)>()>& make_trial) {
  constexpr std::uint64_t kChunk = 16;
  std::atomic<std::uint64_t> next{0};
  auto work = [&]() -> std::uint64_t {
    auto trial = make_trial();
    std::uint64_t hits = 0;
    while (true) {
      const std::uint64_t begin = next.fetch_add(kChunk);
      if (begin >= n_runs) break;
      const std::uint64_t end = std::min(n_runs, begin + kChunk);
      for (std::uint64_t r = begin; r < end; ++r) hits += trial(r) ? 1 : 0;
    }
    return hits;
  };
  if (workers <= 1) return work();
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(workers), 0);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] { counts[static_cast<std::size_t>(w)] = work(); });
  }
  for (auto& t : pool) t.join();
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

RunStats EstimatePi(const ModelConfig& cfg, std::uint64_t n_runs, std::uint64_t seed,
                    const RunOptions& opts) {
  if (n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
  cfg.Validate();
  std::uint64_t hits = 0;
  if (cfg.model == LatticeModel::kCubicBond) {
    const Dims d = cfg.instance.dims;
    const double p = cfg.instance.gate.p_success;
    hits = CountParallel(n_runs, opts.workers, [&] {
      return [d, p, seed, uf = UnionFind()](std::uint64_t r) mutable {
        return CubicBondSpans(d, p, RunRng(seed, r), uf);
      };
    });
  } else {
    const InstanceParams& params = cfg.instance;
    hits = CountParallel(n_runs, opts.workers, [&] {
      return [&params, seed, scratch = InstanceScratch(), g = PercolationGraph(),
              uf = UnionFind()](std::uint64_t r) mutable {
        BuildInstance(params, RunRng(seed, r), scratch, g);
        return Spans(g, uf);
      };
    });
  }
  RunStats stats = MakeStats(hits, n_runs, seed, Fingerprint(cfg.Canonical()));
  if (opts.log) {
    std::ostringstream os;
    const Dims& d = cfg.instance.dims;
    os << "pi dims=" << d.lx << 'x' << d.ly << 'x' << d.lz << " p=" << cfg.instance.gate.p_success
       << " p_loss=" << cfg.instance.loss.p_loss << " -> " << stats.pi << " (" << hits << '/'
       << n_runs << ')';
    opts.log(os.str());
  }
  return stats;
}

namespace {

double Sigmoid(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double LogLikelihood(const std::vector<CurvePoint>& pts, double a, double b, double xbar) {
  double ll = 0.0;
  for (const auto& q : pts) {
    const double eta = a + b * (q.x - xbar);
    // log sigma(eta) = -log1p(exp(-eta)), written to avoid overflow.
    const double log_p = eta >= 0 ? -std::log1p(std::exp(-eta)) : eta - std::log1p(std::exp(eta));
    const double log_q = log_p - eta;
    ll += static_cast<double>(q.k) * log_p + static_cast<double>(q.n - q.k) * log_q;
  }
  return ll;
}

}  // namespace

double LogisticFit::operator()(double p) const { return Sigmoid(a + b * p); }

LogisticFit FitLogistic(const std::vector<CurvePoint>& points) {
  std::set<double> xs;
  double xbar = 0.0;
  std::uint64_t k_total = 0;
  std::uint64_t n_total = 0;
  for (const auto& q : points) {
    if (q.n == 0) continue;
    xs.insert(q.x);
    xbar += q.x;
    k_total += q.k;
    n_total += q.n;
  }
  if (xs.size() < 2) throw FitError("logistic fit needs at least two distinct points");
  if (k_total == 0 || k_total == n_total) throw FitError("logistic fit needs mixed outcomes");
  xbar /= static_cast<double>(xs.size());

  const double mean = static_cast<double>(k_total) / static_cast<double>(n_total);
  double a = std::log(mean / (1 - mean));
  double b = 0.0;
  double ll = LogLikelihood(points, a, b, xbar);
  LogisticFit fit;
  for (int it = 1; it <= 200; ++it) {
    double g0 = 0, g1 = 0, h00 = 0, h01 = 0, h11 = 0;
    for (const auto& q : points) {
      if (q.n == 0) continue;
      const double x = q.x - xbar;
      const double s = Sigmoid(a + b * x);
      const double nn = static_cast<double>(q.n);
      const double r = static_cast<double>(q.k) - nn * s;
      const double w = nn * s * (1 - s);
      g0 += r;
      g1 += r * x;
      h00 += w;
      h01 += w * x;
      h11 += w * x * x;
    }
    const double det = h00 * h11 - h01 * h01;
    if (!(det > 0)) throw FitError("logistic fit: singular information matrix");
    double da = (h11 * g0 - h01 * g1) / det;
    double db = (h00 * g1 - h01 * g0) / det;
    // Step halving keeps the likelihood from decreasing.
    double step = 1.0;
    double ll_new = LogLikelihood(points, a + da, b + db, xbar);
    while (ll_new < ll - 1e-12 && step > 1e-6) {
      step *= 0.5;
      ll_new = LogLikelihood(points, a + step * da, b + step * db, xbar);
    }
    a += step * da;
    b += step * db;
    ll = ll_new;
    fit.iterations = it;
    if (!std::isfinite(a) || !std::isfinite(b) || std::abs(b) > 1e7) {
      throw FitError("logistic fit diverged (separable data)");
    }
    if (std::abs(step * da) < 1e-10 && std::abs(step * db) < 1e-8 * std::max(1.0, std::abs(b))) {
      fit.converged = true;
      break;
    }
  }
  if (!fit.converged) throw FitError("logistic fit did not converge");
  if (b == 0.0) throw FitError("logistic fit has zero slope");
  fit.a = a - b * xbar;
  fit.b = b;
  return fit;
}

ThresholdEstimate EstimateThreshold(const std::vector<SizeCurve>& curves) {
  if (curves.size() < 2) throw std::invalid_argument("threshold needs at least two sizes");
  std::set<int> sizes;
  for (const auto& c : curves) {
    if (!sizes.insert(c.l).second) {
      throw std::invalid_argument("duplicate size " + std::to_string(c.l) +
                                  ": crossing undefined");
    }
    if (c.points.size() < 5) throw std::invalid_argument("threshold needs >= 5 grid points");
    if (!std::is_sorted(c.points.begin(), c.points.end(),
                        [](const CurvePoint& a, const CurvePoint& b) { return a.x < b.x; })) {
      throw std::invalid_argument("p grid must be sorted");
    }
    if (!(c.points.front().pi() < 0.5 && c.points.back().pi() > 0.5)) {
      throw FitError("grid does not straddle the transition for L=" + std::to_string(c.l));
    }
  }
  ThresholdEstimate est;
  for (const auto& c : curves) est.fits.emplace_back(c.l, FitLogistic(c.points));

  double sum = 0.0, sum_linear = 0.0;
  bool all_linear = true;
  double lo = 1.0, hi = 0.0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (std::size_t j = i + 1; j < curves.size(); ++j) {
      const auto& ci = curves[i];
      const auto& cj = curves[j];
      Crossing cr;
      cr.l1 = ci.l;
      cr.l2 = cj.l;
      const double x_min = std::max(ci.points.front().x, cj.points.front().x);
      const double x_max = std::min(ci.points.back().x, cj.points.back().x);
      const LogisticFit& fi = est.fits[i].second;
      const LogisticFit& fj = est.fits[j].second;
      if (fi.b != fj.b) {
        const double p = (fj.a - fi.a) / (fi.b - fj.b);
        if (p >= x_min && p <= x_max) cr.logistic = p;
      }
      // Linear interpolants on the shared grid; take the sign change
      // nearest the logistic crossing, else the first.
      if (ci.points.size() == cj.points.size()) {
        std::optional<double> best;
        for (std::size_t t = 0; t + 1 < ci.points.size(); ++t) {
          if (ci.points[t].x != cj.points[t].x) break;
          const double d0 = ci.points[t].pi() - cj.points[t].pi();
          const double d1 = ci.points[t + 1].pi() - cj.points[t + 1].pi();
          if (d0 == 0.0 && d1 == 0.0) continue;
          if ((d0 <= 0 && d1 > 0) || (d0 >= 0 && d1 < 0) || (d0 < 0 && d1 >= 0) ||
              (d0 > 0 && d1 <= 0)) {
            const double x0 = ci.points[t].x;
            const double x1 = ci.points[t + 1].x;
            const double p = x0 + d0 / (d0 - d1) * (x1 - x0);
            if (!best || (cr.logistic && std::abs(p - *cr.logistic) < std::abs(*best - *cr.logistic))) {
              best = p;
            }
          }
        }
        cr.linear = best;
      }
      if (!cr.logistic && !cr.linear) {
        throw FitError("no crossing between L=" + std::to_string(ci.l) + " and L=" +
                       std::to_string(cj.l) + " inside the grid");
      }
      const double v = cr.value();
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      if (cr.linear) {
        sum_linear += *cr.linear;
      } else {
        all_linear = false;
      }
      est.crossings.push_back(cr);
    }
  }
  const auto m = static_cast<double>(est.crossings.size());
  est.p_c = sum / m;
  est.spread = hi - lo;
  if (all_linear) est.p_c_linear = sum_linear / m;
  return est;
}

ThresholdData SweepThreshold(const ModelConfig& base, const std::vector<int>& sizes,
                             const std::vector<double>& p_grid, std::uint64_t n_runs,
                             std::uint64_t seed, const RunOptions& opts) {
  ThresholdData data;
  for (int l : sizes) {
    SizeCurve curve;
    curve.l = l;
    std::vector<RunStats> row;
    for (double p : p_grid) {
      ModelConfig cfg = base;
      cfg.instance.dims = Dims::Cube(l);
      cfg.instance.gate.p_success = p;
      const RunStats st = EstimatePi(cfg, n_runs, seed, opts);
      curve.points.push_back({p, st.n_spanning, st.n_runs});
      row.push_back(st);
    }
    data.curves.push_back(std::move(curve));
    data.stats.push_back(std::move(row));
  }
  return data;
}

double FitResult::LengthAt(double level) const {
  return decay_length * std::log(amplitude / level);
}

FitResult FitExponential(const std::vector<double>& x, const std::vector<double>& pi,
                         double tail) {
  if (x.size() != pi.size()) throw std::invalid_argument("x and pi sizes differ");
  std::vector<double> tx, ty;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (pi[i] < tail) {
      tx.push_back(x[i]);
      ty.push_back(pi[i]);
    }
  }
  if (tx.size() < 3) throw FitError("exponential fit needs at least 3 tail points");

  // Log-linear start from the positive points.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < tx.size(); ++i) {
    if (ty[i] <= 0) continue;
    const double ly = std::log(ty[i]);
    sx += tx[i];
    sy += ly;
    sxx += tx[i] * tx[i];
    sxy += tx[i] * ly;
    ++m;
  }
  if (m < 2) throw FitError("exponential fit needs two points with nonzero Pi");
  const double den = m * sxx - sx * sx;
  if (den <= 0) throw FitError("exponential fit needs distinct lengths");
  double slope = (m * sxy - sx * sy) / den;
  double log_a = (sy - slope * sx) / m;
  double rate = -slope;
  if (!(rate > 0)) throw FitError("Pi does not decay with length");

  auto sse = [&](double la, double r) {
    double s = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) {
      const double e = ty[i] - std::exp(la - r * tx[i]);
      s += e * e;
    }
    return s;
  };
  // Levenberg-Marquardt on (log A, rate).
  double lambda_lm = 1e-3;
  double cur = sse(log_a, rate);
  FitResult out;
  for (int it = 0; it < 500; ++it) {
    double j00 = 0, j01 = 0, j11 = 0, g0 = 0, g1 = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) {
      const double f = std::exp(log_a - rate * tx[i]);
      const double r = ty[i] - f;
      const double d0 = f;             // d f / d log A
      const double d1 = -tx[i] * f;    // d f / d rate
      j00 += d0 * d0;
      j01 += d0 * d1;
      j11 += d1 * d1;
      g0 += d0 * r;
      g1 += d1 * r;
    }
    const double a00 = j00 * (1 + lambda_lm);
    const double a11 = j11 * (1 + lambda_lm);
    const double det = a00 * a11 - j01 * j01;
    if (!(det > 0)) break;
    const double s0 = (a11 * g0 - j01 * g1) / det;
    const double s1 = (a00 * g1 - j01 * g0) / det;
    const double next = sse(log_a + s0, rate + s1);
    if (next <= cur) {
      log_a += s0;
      rate += s1;
      const bool done = std::abs(s0) < 1e-12 && std::abs(s1) <= 1e-10 * std::abs(rate);
      const bool flat = cur - next <= 1e-15 * std::max(cur, 1e-30);
      cur = next;
      lambda_lm = std::max(lambda_lm / 10, 1e-12);
      if (done || flat) {
        out.converged = true;
        break;
      }
    } else {
      lambda_lm *= 10;
      if (lambda_lm > 1e12) {
        out.converged = true;  // no further descent possible
        break;
      }
    }
  }
  if (!(rate > 0) || !std::isfinite(rate)) throw FitError("fitted decay length is not positive");
  out.amplitude = std::exp(log_a);
  out.decay_length = 1.0 / rate;
  out.residual = cur;
  out.points_used = static_cast<int>(tx.size());
  return out;
}

ChannelResult ChannelSweep(const ModelConfig& base, int cross_section,
                           const std::vector<int>& lengths, std::uint64_t n_runs,
                           std::uint64_t seed, const RunOptions& opts) {
  if (cross_section < 2) throw std::invalid_argument("channel cross section must be >= 2");
  ChannelResult res;
  res.cross_section = cross_section;
  res.lengths = lengths;
  std::vector<double> x, y;
  for (int len : lengths) {
    ModelConfig cfg = base;
    cfg.instance.dims = {len, cross_section, cross_section};
    res.stats.push_back(EstimatePi(cfg, n_runs, seed, opts));
    x.push_back(len);
    y.push_back(res.stats.back().pi);
  }
  try {
    res.fit = FitExponential(x, y);
  } catch (const FitError& e) {
    res.fit_error = e.what();
  }
  return res;
}

std::optional<double> ToleranceAt(const std::vector<double>& x, const std::vector<double>& y,
                                  double level, bool* bracketed) {
  if (bracketed) *bracketed = false;
  if (x.empty() || y.front() < level) return std::nullopt;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (y[i] < level) {
      if (bracketed) *bracketed = true;
      return x[i - 1] + (y[i - 1] - level) / (y[i - 1] - y[i]) * (x[i] - x[i - 1]);
    }
  }
  return x.back();
}

LossSweepResult LossSweep(const ModelConfig& base, int l, const std::vector<double>& p_loss_grid,
                          std::uint64_t n_runs, std::uint64_t seed, const RunOptions& opts) {
  if (!std::is_sorted(p_loss_grid.begin(), p_loss_grid.end())) {
    throw std::invalid_argument("p_loss grid must be sorted ascending");
  }
  LossSweepResult res;
  res.p_loss = p_loss_grid;
  std::vector<double> y;
  for (double pl : p_loss_grid) {
    ModelConfig cfg = base;
    cfg.instance.dims = Dims::Cube(l);
    cfg.instance.loss.p_loss = pl;
    res.stats.push_back(EstimatePi(cfg, n_runs, seed, opts));
    y.push_back(res.stats.back().pi);
  }
  res.tolerance = ToleranceAt(p_loss_grid, y, 0.9, &res.bracketed);
  return res;
}

RenormResult RenormalizedChannel(const ModelConfig& base, int k,
                                 const std::vector<int>& n_blocks, std::uint64_t n_runs,
                                 std::uint64_t seed, const RunOptions& opts) {
  if (k < 2) throw std::invalid_argument("block size k must be >= 2");
  RenormResult res;
  res.block = k;
  res.n_blocks = n_blocks;
  std::vector<double> x, y;
  for (int nb : n_blocks) {
    if (nb < 1) throw std::invalid_argument("n_blocks must be >= 1");
    ModelConfig cfg = base;
    cfg.instance.dims = {k * nb, k, k};
    res.stats.push_back(EstimatePi(cfg, n_runs, seed, opts));
    x.push_back(nb);
    y.push_back(res.stats.back().pi);
  }
  try {
    res.fit = FitExponential(x, y);
  } catch (const FitError& e) {
    res.fit_error = e.what();
  }
  return res;
}

}  // namespace fusionperc
