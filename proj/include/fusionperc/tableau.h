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

#ifndef FUSIONPERC_TABLEAU_H_
#define FUSIONPERC_TABLEAU_H_

#include <cstdint>
#include <string>
#include <vector>

#include "fusionperc/clifford.h"

namespace fusionperc {

/// Hermitian Pauli string over n qubits in (x, z) bit form; x = z = 1 is Y.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int n);

  int size() const { return n_; }
  bool X(int q) const { return Bit(x_, q); }
  bool Z(int q) const { return Bit(z_, q); }
  void Set(int q, Pauli p);
  void Set(int q, bool x, bool z);
  bool negative() const { return negative_; }
  void set_negative(bool neg) { negative_ = neg; }
  bool IsIdentity() const;

  bool Commutes(const PauliString& other) const;
  /// this <- this * other; both must commute.
  void MultiplyBy(const PauliString& other);

  std::string ToString() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  friend class StabilizerTableau;
  static bool Bit(const std::vector<std::uint64_t>& w, int q) {
    return (w[q >> 6] >> (q & 63)) & 1u;
  }

  int n_ = 0;
  std::vector<std::uint64_t> x_;
  std::vector<std::uint64_t> z_;
  bool negative_ = false;
};

/// Stabilizer group of a pure n-qubit state, stored as n generators.
/// Clifford-only exact oracle for graph-state rewrite rules.
class StabilizerTableau {
 public:
  /// |0...0>.
  explicit StabilizerTableau(int n);

  /// Graph state |G> on n qubits from an adjacency list.
  static StabilizerTableau FromEdges(int n, const std::vector<std::pair<int, int>>& edges);

  int qubits() const { return n_; }
  const std::vector<PauliString>& generators() const { return gens_; }

  void ApplyClifford(int q, const Clifford& c);
  void ApplyHadamard(int q) { ApplyClifford(q, Clifford::Hadamard()); }
  void ApplyCz(int a, int b);

  /// Projective measurement of a Hermitian Pauli string. For random outcomes
  /// the +1 branch is taken when `prefer_plus`, else -1. Returns +1 or -1.
  int Measure(const PauliString& p, bool prefer_plus = true);
  int MeasureSingle(int q, Pauli axis, bool prefer_plus = true);

  /// Generators commute pairwise and are independent over GF(2).
  bool IsValid() const;

  /// Adjacency of an LC-equivalent graph state, obtained by Hadamards on a
  /// pivot set followed by phase gates. Edge-set is canonical for states
  /// that already are graph states up to diagonal local Cliffords.
  std::vector<std::vector<bool>> ExtractGraph() const;

  /// Finest product partition of the qubits (connected components of the
  /// extracted graph). Each part is sorted; parts ordered by first qubit.
  std::vector<std::vector<int>> Components() const;

 private:
  int n_;
  std::vector<PauliString> gens_;
};

}  // namespace fusionperc

#endif  // FUSIONPERC_TABLEAU_H_
