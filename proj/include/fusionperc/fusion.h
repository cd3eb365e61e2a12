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

#ifndef FUSIONPERC_FUSION_H_
#define FUSIONPERC_FUSION_H_

#include <cstdint>
#include <string>
#include <vector>

#include "fusionperc/graph_state.h"
#include "fusionperc/rng.h"

namespace fusionperc {

/// Ancilla resource used to boost the gate to 75%: one Bell pair (two
/// photons) or four single photons.
enum class GateScheme { kBellAncilla, kFourSingles };

enum class LossScope { kDataOnly, kDataAndAncilla };

struct GateParams {
  double p_success = 0.75;
  GateScheme scheme = GateScheme::kBellAncilla;
  FusionBasis failure_basis = FusionBasis::Rotated();

  int ancilla_photons() const { return scheme == GateScheme::kBellAncilla ? 2 : 4; }
  /// Throws std::invalid_argument on out-of-range probabilities.
  void Validate() const;
};

/// Photon roles inside one gate, as a bit set: data1, data2, ancilla 0..3.
class PhotonSet {
 public:
  enum Role : std::uint8_t {
    kData1 = 0, kData2 = 1, kAncilla0 = 2, kAncilla1 = 3, kAncilla2 = 4, kAncilla3 = 5
  };

  constexpr PhotonSet() = default;
  constexpr explicit PhotonSet(std::uint8_t bits) : bits_(bits) {}

  static constexpr PhotonSet Data() { return PhotonSet(0b11); }

  void Add(Role r) { bits_ |= static_cast<std::uint8_t>(1u << r); }
  bool Contains(Role r) const { return (bits_ >> r) & 1u; }
  bool empty() const { return bits_ == 0; }
  int count() const { return __builtin_popcount(bits_); }
  std::uint8_t bits() const { return bits_; }
  std::vector<Role> roles() const;

  friend bool operator==(PhotonSet, PhotonSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

std::string RoleName(PhotonSet::Role r);

enum class FusionKind : std::uint8_t { kSuccess, kFailure, kLossDetected };

struct FusionResult {
  FusionKind kind = FusionKind::kSuccess;
  PhotonSet lost;

  static FusionResult Success() { return {FusionKind::kSuccess, {}}; }
  static FusionResult Failure() { return {FusionKind::kFailure, {}}; }
  static FusionResult Loss(PhotonSet lost) { return {FusionKind::kLossDetected, lost}; }

  friend bool operator==(const FusionResult&, const FusionResult&) = default;
};

/// Samples one boosted Type-II fusion. `outcome_draw` decides success;
/// draws 0.. of `loss_draws` decide the loss of data1, data2, ancilla 0..3,
/// so the outcome of a gate is a monotone function of (p_success, p_loss)
/// under common random numbers. Any in-scope loss aborts the gate.
FusionResult SampleFusion(const GateParams& params, double p_loss, LossScope scope,
                          double outcome_draw, DrawStream& loss_draws);

/// Same, for gate `fusion_id` of a run: the outcome is index fusion_id of
/// the packed fusion-outcome stream, losses come from entity fusion_id.
FusionResult SampleFusion(const GateParams& params, double p_loss, LossScope scope,
                          const RunRng& rng, std::uint32_t fusion_id,
                          PackedStream& outcomes);

/// p_success * (1 - p_loss)^(photons in scope).
double EffectiveSuccessProb(const GateParams& params, double p_loss, LossScope scope);

int PhotonsInScope(const GateParams& params, LossScope scope);

}  // namespace fusionperc

#endif  // FUSIONPERC_FUSION_H_
