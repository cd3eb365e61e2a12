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

#ifndef FUSIONPERC_CLIFFORD_H_
#define FUSIONPERC_CLIFFORD_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace fusionperc {

enum class Pauli : std::uint8_t { kX = 0, kY = 1, kZ = 2 };

char PauliChar(Pauli p);
std::optional<Pauli> ParsePauli(std::string_view s);

struct SignedPauli {
  Pauli axis = Pauli::kX;
  bool negative = false;

  friend bool operator==(const SignedPauli&, const SignedPauli&) = default;
};

/// One of the 24 single-qubit Clifford operations modulo global phase,
/// identified by how it conjugates X and Z: C X C^dag and C Z C^dag.
class Clifford {
 public:
  /// Identity.
  constexpr Clifford() = default;

  static std::optional<Clifford> FromImages(SignedPauli x_image,
                                            SignedPauli z_image);
  static Clifford FromIndex(int index);

  static Clifford Identity() { return {}; }
  static Clifford Hadamard();
  static Clifford Phase();     // S = diag(1, i)
  static Clifford SqrtX();     // exp(-i pi/4 X)
  static Clifford SqrtZ();     // exp(+i pi/4 Z)

  /// C P C^dag.
  SignedPauli Conjugate(Pauli p) const;

  /// Product acting as (*this) after `rhs`.
  Clifford operator*(const Clifford& rhs) const;
  Clifford Inverse() const;

  /// Dense index in [0, 24).
  int Index() const;

  /// Compact text form, e.g. "+X+Z" for the identity and "+Z+X" for H.
  std::string Name() const;
  static std::optional<Clifford> Parse(std::string_view name);

  friend bool operator==(const Clifford&, const Clifford&) = default;

 private:
  constexpr Clifford(SignedPauli x, SignedPauli z) : x_(x), z_(z) {}

  SignedPauli x_{Pauli::kX, false};
  SignedPauli z_{Pauli::kZ, false};
};

}  // namespace fusionperc

#endif  // FUSIONPERC_CLIFFORD_H_
