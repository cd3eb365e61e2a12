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

#include "fusionperc/tableau.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "fusionperc/union_find.h"

namespace fusionperc {
namespace {

// Exponent of i picked up by (x1,z1) * (x2,z2) on one qubit
// (Aaronson & Gottesman, quant-ph/0406196).
int PhaseExponent(bool x1, bool z1, bool x2, bool z2) {
  if (!x1 && !z1) return 0;
  if (x1 && z1) return static_cast<int>(z2) - static_cast<int>(x2);
  if (x1) return static_cast<int>(z2) * (2 * static_cast<int>(x2) - 1);
  return static_cast<int>(x2) * (1 - 2 * static_cast<int>(z2));
}

}  // namespace

PauliString::PauliString(int n)
    : n_(n), x_((n + 63) / 64, 0), z_((n + 63) / 64, 0) {}

void PauliString::Set(int q, bool x, bool z) {
  const std::uint64_t bit = std::uint64_t{1} << (q & 63);
  x_[q >> 6] = x ? (x_[q >> 6] | bit) : (x_[q >> 6] & ~bit);
  z_[q >> 6] = z ? (z_[q >> 6] | bit) : (z_[q >> 6] & ~bit);
}

void PauliString::Set(int q, Pauli p) {
  Set(q, p != Pauli::kZ, p != Pauli::kX);
}

bool PauliString::IsIdentity() const {
  for (std::size_t w = 0; w < x_.size(); ++w) {
    if (x_[w] | z_[w]) return false;
  }
  return true;
}

bool PauliString::Commutes(const PauliString& other) const {
  std::uint64_t parity = 0;
  for (std::size_t w = 0; w < x_.size(); ++w) {
    parity ^= (x_[w] & other.z_[w]) ^ (z_[w] & other.x_[w]);
  }
  return __builtin_parityll(parity) == 0;
}

void PauliString::MultiplyBy(const PauliString& other) {
  int e = 2 * (negative_ ? 1 : 0) + 2 * (other.negative_ ? 1 : 0);
  for (int q = 0; q < n_; ++q) {
    e += PhaseExponent(X(q), Z(q), other.X(q), other.Z(q));
  }
  e = ((e % 4) + 4) % 4;
  if (e % 2 != 0) throw std::logic_error("product of anticommuting Pauli strings");
  negative_ = (e == 2);
  for (std::size_t w = 0; w < x_.size(); ++w) {
    x_[w] ^= other.x_[w];
    z_[w] ^= other.z_[w];
  }
}

std::string PauliString::ToString() const {
  std::string s(negative_ ? "-" : "+");
  for (int q = 0; q < n_; ++q) {
    const bool x = X(q), z = Z(q);
    s += x ? (z ? 'Y' : 'X') : (z ? 'Z' : '_');
  }
  return s;
}

StabilizerTableau::StabilizerTableau(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("tableau needs at least one qubit");
  gens_.reserve(n);
  for (int q = 0; q < n; ++q) {
    PauliString p(n);
    p.Set(q, Pauli::kZ);
    gens_.push_back(std::move(p));
  }
}

StabilizerTableau StabilizerTableau::FromEdges(
    int n, const std::vector<std::pair<int, int>>& edges) {
  StabilizerTableau t(n);
  for (int q = 0; q < n; ++q) t.ApplyHadamard(q);
  for (const auto& [a, b] : edges) t.ApplyCz(a, b);
  return t;
}

void StabilizerTableau::ApplyClifford(int q, const Clifford& c) {
  for (auto& g : gens_) {
    const bool x = g.X(q), z = g.Z(q);
    if (!x && !z) continue;
    const Pauli p = x ? (z ? Pauli::kY : Pauli::kX) : Pauli::kZ;
    const SignedPauli img = c.Conjugate(p);
    g.Set(q, img.axis);
    if (img.negative) g.set_negative(!g.negative());
  }
}

void StabilizerTableau::ApplyCz(int a, int b) {
  if (a == b) throw std::invalid_argument("CZ on a single qubit");
  for (auto& g : gens_) {
    const bool xa = g.X(a), za = g.Z(a), xb = g.X(b), zb = g.Z(b);
    // CZ: X_a -> X_a Z_b, X_b -> Z_a X_b; X_a Y_b and Y_a X_b flip sign.
    if (xa && xb && (za != zb)) g.set_negative(!g.negative());
    g.Set(a, xa, za ^ xb);
    g.Set(b, xb, zb ^ xa);
  }
}

int StabilizerTableau::Measure(const PauliString& p, bool prefer_plus) {
  if (p.size() != n_) throw std::invalid_argument("Pauli string size mismatch");
  int first = -1;
  for (int i = 0; i < n_; ++i) {
    if (gens_[i].Commutes(p)) continue;
    if (first < 0) {
      first = i;
    } else {
      gens_[i].MultiplyBy(gens_[first]);
    }
  }
  if (first >= 0) {
    gens_[first] = p;
    if (!prefer_plus) gens_[first].set_negative(!p.negative());
    return prefer_plus ? 1 : -1;
  }

  // Deterministic: write p as a product of generators.
  std::vector<PauliString> rows = gens_;
  std::vector<std::vector<int>> combo(n_);
  for (int i = 0; i < n_; ++i) combo[i] = {i};
  PauliString target = p;
  target.set_negative(false);
  std::vector<int> used;
  auto toggle = [](std::vector<int>& s, const std::vector<int>& add) {
    for (int v : add) {
      auto it = std::find(s.begin(), s.end(), v);
      if (it == s.end()) s.push_back(v); else s.erase(it);
    }
  };
  int r = 0;
  for (int col = 0; col < 2 * n_ && r < n_; ++col) {
    const bool is_x = col < n_;
    const int q = is_x ? col : col - n_;
    auto has = [&](const PauliString& s) { return is_x ? s.X(q) : s.Z(q); };
    int piv = -1;
    for (int i = r; i < n_; ++i) {
      if (has(rows[i])) { piv = i; break; }
    }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[r]);
    std::swap(combo[piv], combo[r]);
    for (int i = 0; i < n_; ++i) {
      if (i != r && has(rows[i])) {
        rows[i].MultiplyBy(rows[r]);
        toggle(combo[i], combo[r]);
      }
    }
    if (has(target)) {
      target.MultiplyBy(rows[r]);
      toggle(used, combo[r]);
    }
    ++r;
  }
  if (!target.IsIdentity()) throw std::logic_error("deterministic measurement not in group");
  PauliString prod(n_);
  for (int i : used) prod.MultiplyBy(gens_[i]);
  return prod.negative() == p.negative() ? 1 : -1;
}

int StabilizerTableau::MeasureSingle(int q, Pauli axis, bool prefer_plus) {
  PauliString p(n_);
  p.Set(q, axis);
  return Measure(p, prefer_plus);
}

bool StabilizerTableau::IsValid() const {
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      if (!gens_[i].Commutes(gens_[j])) return false;
    }
  }
  // Rank over GF(2) of the 2n-bit rows.
  std::vector<PauliString> rows = gens_;
  for (auto& r : rows) r.set_negative(false);
  int rank = 0;
  for (int col = 0; col < 2 * n_ && rank < n_; ++col) {
    const bool is_x = col < n_;
    const int q = is_x ? col : col - n_;
    auto has = [&](const PauliString& s) { return is_x ? s.X(q) : s.Z(q); };
    int piv = -1;
    for (int i = rank; i < n_; ++i) {
      if (has(rows[i])) { piv = i; break; }
    }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[rank]);
    for (int i = 0; i < n_; ++i) {
      if (i != rank && has(rows[i])) {
        for (std::size_t w = 0; w < rows[i].x_.size(); ++w) {
          rows[i].x_[w] ^= rows[rank].x_[w];
          rows[i].z_[w] ^= rows[rank].z_[w];
        }
      }
    }
    ++rank;
  }
  return rank == n_;
}

std::vector<std::vector<bool>> StabilizerTableau::ExtractGraph() const {
  std::vector<PauliString> rows = gens_;
  // Row-reduce on the X block.
  std::vector<bool> pivot_col(n_, false);
  int r = 0;
  for (int q = 0; q < n_ && r < n_; ++q) {
    int piv = -1;
    for (int i = r; i < n_; ++i) {
      if (rows[i].X(q)) { piv = i; break; }
    }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[r]);
    for (int i = 0; i < n_; ++i) {
      if (i != r && rows[i].X(q)) rows[i].MultiplyBy(rows[r]);
    }
    pivot_col[q] = true;
    ++r;
  }
  // Rows without X support are independent on the non-pivot columns;
  // Hadamards there make the X block invertible.
  for (int q = 0; q < n_; ++q) {
    if (pivot_col[q]) continue;
    for (auto& row : rows) {
      const bool x = row.X(q), z = row.Z(q);
      row.Set(q, z, x);
    }
  }
  for (int q = 0; q < n_; ++q) {
    int piv = -1;
    for (int i = q; i < n_; ++i) {
      if (rows[i].X(q)) { piv = i; break; }
    }
    if (piv < 0) throw std::logic_error("graph extraction: X block singular");
    std::swap(rows[piv], rows[q]);
    for (int i = 0; i < n_; ++i) {
      if (i != q && rows[i].X(q)) rows[i].MultiplyBy(rows[q]);
    }
  }
  std::vector<std::vector<bool>> adj(n_, std::vector<bool>(n_, false));
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      if (i != j) adj[i][j] = rows[i].Z(j);
    }
  }
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      if (adj[i][j] != adj[j][i]) throw std::logic_error("graph extraction: asymmetric");
    }
  }
  return adj;
}

std::vector<std::vector<int>> StabilizerTableau::Components() const {
  const auto adj = ExtractGraph();
  UnionFind uf(n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      if (adj[i][j]) uf.Union(i, j);
    }
  }
  std::vector<std::vector<int>> parts;
  std::vector<int> slot(n_, -1);
  for (int q = 0; q < n_; ++q) {
    const int root = uf.Find(q);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(parts.size());
      parts.emplace_back();
    }
    parts[slot[root]].push_back(q);
  }
  return parts;
}

}  // namespace fusionperc
