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

#include "fusionperc/microcluster.h"

#include <stdexcept>

namespace fusionperc {

std::string_view SlotName(ArmSlot s) {
  switch (s) {
    case ArmSlot::kMinusX: return "-X";
    case ArmSlot::kPlusX: return "+X";
    case ArmSlot::kT1: return "T1";
    case ArmSlot::kT2: return "T2";
  }
  return "?";
}

std::optional<ArmSlot> ParseSlot(std::string_view s) {
  for (ArmSlot slot : kAllSlots) {
    if (SlotName(slot) == s) return slot;
  }
  return std::nullopt;
}

bool ArmAssignment::Valid() const {
  int seen = 0;
  for (ArmSlot s : side1) seen |= 1 << SlotIndex(s);
  for (ArmSlot s : side2) seen |= 1 << SlotIndex(s);
  return seen == 0b1111;
}

std::string ArmAssignment::ToString() const {
  std::string s = "side1=[";
  s += SlotName(side1[0]);
  s += ",";
  s += SlotName(side1[1]);
  s += "] side2=[";
  s += SlotName(side2[0]);
  s += ",";
  s += SlotName(side2[1]);
  s += "]";
  return s;
}

ArmAssignment DefaultAssignment() { return {}; }

std::array<ArmAssignment, 3> AllPairings() {
  return {ArmAssignment{{ArmSlot::kMinusX, ArmSlot::kT1}, {ArmSlot::kPlusX, ArmSlot::kT2}},
          ArmAssignment{{ArmSlot::kMinusX, ArmSlot::kT2}, {ArmSlot::kPlusX, ArmSlot::kT1}},
          ArmAssignment{{ArmSlot::kMinusX, ArmSlot::kPlusX}, {ArmSlot::kT1, ArmSlot::kT2}}};
}

std::optional<InternalFailureRule> SiteRuleFor(const FusionBasis& basis) {
  // Fused qubits are (central GHZ leaf, side GHZ center). Only the
  // graph-frame axes matter: leaf axis Z keeps the center intact, leaf axis
  // X disconnects it; side-center axis X leaves a bonded pair, Z kills both.
  const Pauli leaf = basis.mode == FusionMode::kRotated
                         ? Clifford::Hadamard().Conjugate(basis.first).axis
                         : basis.first;
  const Pauli side = basis.second;
  if (leaf == Pauli::kZ && side == Pauli::kX) return InternalFailureRule::kDetachPair;
  if (leaf == Pauli::kX && side == Pauli::kZ) return InternalFailureRule::kDisconnect;
  return std::nullopt;
}

std::string_view SiteClassName(SiteClass c) {
  switch (c) {
    case SiteClass::kFullStar: return "full_star";
    case SiteClass::kOneDetached: return "one_detached";
    case SiteClass::kTwoDetached: return "two_detached";
    case SiteClass::kPartial: return "partial";
    case SiteClass::kCenterDead: return "center_dead";
  }
  return "?";
}

std::vector<ArmSlot> SiteOutcome::attached_arms() const {
  std::vector<ArmSlot> out;
  for (ArmSlot s : kAllSlots) {
    if (attached(s)) out.push_back(s);
  }
  return out;
}

std::vector<std::pair<ArmSlot, ArmSlot>> SiteOutcome::detached_pairs() const {
  std::vector<std::pair<ArmSlot, ArmSlot>> out;
  for (ArmSlot s : kAllSlots) {
    const auto p = partner(s);
    if (p && SlotIndex(s) < SlotIndex(*p)) out.emplace_back(s, *p);
  }
  return out;
}

std::vector<ArmSlot> SiteOutcome::dead_arms() const {
  std::vector<ArmSlot> out;
  for (ArmSlot s : kAllSlots) {
    if (dead(s)) out.push_back(s);
  }
  return out;
}

SiteClass SiteOutcome::Class() const {
  if (!center_alive_) return SiteClass::kCenterDead;
  const int pairs = static_cast<int>(detached_pairs().size());
  const int n = attached_count();
  if (n == 4) return SiteClass::kFullStar;
  if (n == 2 && pairs == 1) return SiteClass::kOneDetached;
  if (n == 0 && pairs == 2) return SiteClass::kTwoDetached;
  return SiteClass::kPartial;
}

void SiteOutcome::Attach(ArmSlot s) {
  Kill(s);
  attached_ |= static_cast<std::uint8_t>(1u << SlotIndex(s));
}

void SiteOutcome::Pair(ArmSlot a, ArmSlot b) {
  Kill(a);
  Kill(b);
  partner_[SlotIndex(a)] = static_cast<std::int8_t>(SlotIndex(b));
  partner_[SlotIndex(b)] = static_cast<std::int8_t>(SlotIndex(a));
}

void SiteOutcome::Kill(ArmSlot s) {
  const int i = SlotIndex(s);
  attached_ &= static_cast<std::uint8_t>(~(1u << i));
  if (partner_[i] >= 0) {
    partner_[partner_[i]] = -1;
    partner_[i] = -1;
  }
}

bool SiteOutcome::Consistent() const {
  if (!center_alive_ && attached_ != 0) return false;
  for (int i = 0; i < 4; ++i) {
    const int p = partner_[i];
    if (p >= 0) {
      if (p == i || partner_[p] != i) return false;
      if ((attached_ >> i) & 1u) return false;
    }
  }
  return true;
}

SiteOutcome SiteOutcomeFrom(const FusionResult& side1, const FusionResult& side2,
                            const ArmAssignment& assignment, InternalFailureRule rule) {
  if (!assignment.Valid()) throw std::invalid_argument("arm assignment must partition the slots");
  const std::array<const FusionResult*, 2> results{&side1, &side2};
  const std::array<const std::array<ArmSlot, 2>*, 2> slots{&assignment.side1,
                                                          &assignment.side2};
  SiteOutcome out;
  bool alive = true;
  bool disconnected = false;
  for (const FusionResult* r : results) {
    if (r->kind == FusionKind::kLossDetected && r->lost.Contains(PhotonSet::kData1)) {
      alive = false;
    }
    if (r->kind == FusionKind::kFailure && rule == InternalFailureRule::kDisconnect) {
      disconnected = true;
    }
  }
  out.set_center_alive(alive);
  for (int side = 0; side < 2; ++side) {
    const auto& s = *slots[side];
    switch (results[side]->kind) {
      case FusionKind::kSuccess:
        if (alive && !disconnected) {
          out.Attach(s[0]);
          out.Attach(s[1]);
        }
        break;
      case FusionKind::kFailure:
        if (rule == InternalFailureRule::kDetachPair) out.Pair(s[0], s[1]);
        break;
      case FusionKind::kLossDetected:
        break;
    }
  }
  return out;
}

SiteOutcome BuildSite(const GateParams& gate, double p_loss, LossScope scope,
                      const ArmAssignment& assignment, const RunRng& rng,
                      std::uint32_t site) {
  const auto rule = SiteRuleFor(gate.failure_basis);
  if (!rule) throw std::invalid_argument("failure basis not supported by the site builder");
  PackedStream outcomes(rng, PackedStream::kFusionOutcomes);
  const FusionResult r1 =
      SampleFusion(gate, p_loss, scope, rng, InternalFusionEntity(site, 0), outcomes);
  const FusionResult r2 =
      SampleFusion(gate, p_loss, scope, rng, InternalFusionEntity(site, 1), outcomes);
  return SiteOutcomeFrom(r1, r2, assignment, *rule);
}

std::map<SiteClass, double> OutcomeDistribution(const GateParams& gate, double p_loss) {
  if (p_loss != 0.0) {
    throw std::invalid_argument("outcome distribution is loss-free; use Monte Carlo for p_loss > 0");
  }
  const double p = gate.p_success;
  return {{SiteClass::kFullStar, p * p},
          {SiteClass::kOneDetached, 2 * p * (1 - p)},
          {SiteClass::kTwoDetached, (1 - p) * (1 - p)}};
}

}  // namespace fusionperc
