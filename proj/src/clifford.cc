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

#include "fusionperc/clifford.h"

#include <stdexcept>

namespace fusionperc {
namespace {

// Levi-Civita sign for distinct axes a, b: +1 when (a, b) is cyclic.
int Epsilon(Pauli a, Pauli b) {
  const int d = (static_cast<int>(b) - static_cast<int>(a) + 3) % 3;
  return d == 1 ? 1 : -1;
}

Pauli Third(Pauli a, Pauli b) {
  return static_cast<Pauli>(3 - static_cast<int>(a) - static_cast<int>(b));
}

}  // namespace

char PauliChar(Pauli p) {
  switch (p) {
    case Pauli::kX: return 'X';
    case Pauli::kY: return 'Y';
    case Pauli::kZ: return 'Z';
  }
  return '?';
}

std::optional<Pauli> ParsePauli(std::string_view s) {
  if (s == "X" || s == "x") return Pauli::kX;
  if (s == "Y" || s == "y") return Pauli::kY;
  if (s == "Z" || s == "z") return Pauli::kZ;
  return std::nullopt;
}

std::optional<Clifford> Clifford::FromImages(SignedPauli x_image,
                                             SignedPauli z_image) {
  if (x_image.axis == z_image.axis) return std::nullopt;
  return Clifford(x_image, z_image);
}

Clifford Clifford::FromIndex(int index) {
  if (index < 0 || index >= 24) throw std::out_of_range("clifford index");
  const int xa = index / 8;
  const int zslot = (index / 4) % 2;
  const Pauli x_axis = static_cast<Pauli>(xa);
  Pauli z_axis = static_cast<Pauli>((xa + 1 + zslot) % 3);
  return Clifford({x_axis, (index & 2) != 0}, {z_axis, (index & 1) != 0});
}

int Clifford::Index() const {
  const int xa = static_cast<int>(x_.axis);
  const int zslot = (static_cast<int>(z_.axis) - xa + 3) % 3 - 1;
  return xa * 8 + zslot * 4 + (x_.negative ? 2 : 0) + (z_.negative ? 1 : 0);
}

Clifford Clifford::Hadamard() {
  return Clifford({Pauli::kZ, false}, {Pauli::kX, false});
}

Clifford Clifford::Phase() {
  return Clifford({Pauli::kY, false}, {Pauli::kZ, false});
}

Clifford Clifford::SqrtX() {
  return Clifford({Pauli::kX, false}, {Pauli::kY, true});
}

Clifford Clifford::SqrtZ() {
  return Clifford({Pauli::kY, true}, {Pauli::kZ, false});
}

SignedPauli Clifford::Conjugate(Pauli p) const {
  switch (p) {
    case Pauli::kX: return x_;
    case Pauli::kZ: return z_;
    case Pauli::kY: {
      // Y = i X Z, so C Y C^dag = i (sx P)(sz Q) = -eps(P,Q) sx sz R.
      const int sign = -Epsilon(x_.axis, z_.axis) * (x_.negative ? -1 : 1) *
                       (z_.negative ? -1 : 1);
      return {Third(x_.axis, z_.axis), sign < 0};
    }
  }
  return {};
}

Clifford Clifford::operator*(const Clifford& rhs) const {
  auto apply = [this](SignedPauli sp) {
    SignedPauli out = Conjugate(sp.axis);
    out.negative = out.negative != sp.negative;
    return out;
  };
  return Clifford(apply(rhs.x_), apply(rhs.z_));
}

Clifford Clifford::Inverse() const {
  for (int i = 0; i < 24; ++i) {
    const Clifford c = FromIndex(i);
    if ((*this * c) == Clifford()) return c;
  }
  throw std::logic_error("clifford without inverse");
}

std::string Clifford::Name() const {
  std::string s;
  s += x_.negative ? '-' : '+';
  s += PauliChar(x_.axis);
  s += z_.negative ? '-' : '+';
  s += PauliChar(z_.axis);
  return s;
}

std::optional<Clifford> Clifford::Parse(std::string_view name) {
  if (name.size() != 4) return std::nullopt;
  auto sign = [](char c) -> std::optional<bool> {
    if (c == '+') return false;
    if (c == '-') return true;
    return std::nullopt;
  };
  const auto sx = sign(name[0]);
  const auto sz = sign(name[2]);
  const auto px = ParsePauli(name.substr(1, 1));
  const auto pz = ParsePauli(name.substr(3, 1));
  if (!sx || !sz || !px || !pz) return std::nullopt;
  return FromImages({*px, *sx}, {*pz, *sz});
}

}  // namespace fusionperc
