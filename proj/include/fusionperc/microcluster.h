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

#ifndef FUSIONPERC_MICROCLUSTER_H_
#define FUSIONPERC_MICROCLUSTER_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fusionperc/fusion.h"
#include "fusionperc/rng.h"

namespace fusionperc {

/// Arm directions of a site. T1/T2 are the two transverse arms, whose
/// orientation is resolved by the lattice parity rule.
enum class ArmSlot : std::uint8_t { kMinusX = 0, kPlusX = 1, kT1 = 2, kT2 = 3 };

inline constexpr std::array<ArmSlot, 4> kAllSlots = {ArmSlot::kMinusX, ArmSlot::kPlusX,
                                                     ArmSlot::kT1, ArmSlot::kT2};

inline int SlotIndex(ArmSlot s) { return static_cast<int>(s); }
std::string_view SlotName(ArmSlot s);
std::optional<ArmSlot> ParseSlot(std::string_view s);

/// Which arm slots the two leaves of each side GHZ occupy.
struct ArmAssignment {
  std::array<ArmSlot, 2> side1{ArmSlot::kMinusX, ArmSlot::kT1};
  std::array<ArmSlot, 2> side2{ArmSlot::kPlusX, ArmSlot::kT2};

  /// The two pairs partition the four slots.
  bool Valid() const;
  std::string ToString() const;

  friend bool operator==(const ArmAssignment&, const ArmAssignment&) = default;
};

/// One X arm and one transverse arm per side.
ArmAssignment DefaultAssignment();

/// The three distinct ways to split the four slots into two pairs, default
/// first.
std::array<ArmAssignment, 3> AllPairings();

/// How an internal fusion failure acts on the site, derived from the
/// failure basis (see SiteRuleFor).
enum class InternalFailureRule {
  kDetachPair,   // side center X-measured: its leaves stay bonded
  kDisconnect,   // failure cuts the center loose and kills the side
};

/// Maps a failure basis to the rule the fast builder implements; nullopt if
/// the basis is not supported by the fast builder.
std::optional<InternalFailureRule> SiteRuleFor(const FusionBasis& basis);

enum class SiteClass : std::uint8_t {
  kFullStar,      // 4 attached arms
  kOneDetached,   // 2 attached arms, one detached pair
  kTwoDetached,   // center alive with no arms, two detached pairs
  kPartial,       // center alive, some arms dead (loss or failure rule)
  kCenterDead,
};

std::string_view SiteClassName(SiteClass c);

/// Arm structure of a site after its two internal fusions.
class SiteOutcome {
 public:
  SiteOutcome() = default;

  bool center_alive() const { return center_alive_; }
  bool attached(ArmSlot s) const { return (attached_ >> SlotIndex(s)) & 1u; }
  bool dead(ArmSlot s) const { return !attached(s) && partner_[SlotIndex(s)] < 0; }
  /// Detached-pair partner of s, if any.
  std::optional<ArmSlot> partner(ArmSlot s) const {
    const int p = partner_[SlotIndex(s)];
    if (p < 0) return std::nullopt;
    return static_cast<ArmSlot>(p);
  }
  int attached_count() const { return __builtin_popcount(attached_); }
  std::vector<ArmSlot> attached_arms() const;
  std::vector<std::pair<ArmSlot, ArmSlot>> detached_pairs() const;
  std::vector<ArmSlot> dead_arms() const;
  bool full_success() const { return center_alive_ && attached_count() == 4; }
  SiteClass Class() const;

  void set_center_alive(bool alive) { center_alive_ = alive; }
  void Attach(ArmSlot s);
  void Pair(ArmSlot a, ArmSlot b);
  void Kill(ArmSlot s);

  /// Attached, paired and dead slots partition the four slots, and a dead
  /// center has no attached arms.
  bool Consistent() const;

  std::uint8_t attached_mask() const { return attached_; }
  std::int8_t raw_partner(int slot) const { return partner_[slot]; }

  friend bool operator==(const SiteOutcome&, const SiteOutcome&) = default;

 private:
  bool center_alive_ = false;
  std::uint8_t attached_ = 0;
  std::array<std::int8_t, 4> partner_{-1, -1, -1, -1};
};

/// Site outcome for given internal fusion results. Photon roles in each
/// internal gate: data1 = central GHZ leaf, data2 = side GHZ center.
///   success: side arms attach to the center (if alive)
///   failure: side arms form a detached pair (kDetachPair)
///   loss:    side arms dead; a lost central leaf Z-cuts the center
SiteOutcome SiteOutcomeFrom(const FusionResult& side1, const FusionResult& side2,
                            const ArmAssignment& assignment,
                            InternalFailureRule rule = InternalFailureRule::kDetachPair);

/// Rng entity of internal fusion `side` (0 or 1) of site `site`.
inline std::uint32_t InternalFusionEntity(std::uint32_t site, int side) {
  return 2 * site + static_cast<std::uint32_t>(side);
}

/// Samples both internal fusions of a site and maps them to its outcome.
SiteOutcome BuildSite(const GateParams& gate, double p_loss, LossScope scope,
                      const ArmAssignment& assignment, const RunRng& rng,
                      std::uint32_t site);

/// Loss-free class probabilities: full star p^2, one detached 2p(1-p), two
/// detached (1-p)^2. Throws for p_loss != 0.
std::map<SiteClass, double> OutcomeDistribution(const GateParams& gate, double p_loss = 0.0);

}  // namespace fusionperc

#endif  // FUSIONPERC_MICROCLUSTER_H_
