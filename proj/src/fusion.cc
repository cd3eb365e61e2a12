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

#include "fusionperc/fusion.h"

#include <cmath>
#include <stdexcept>

namespace fusionperc {

void GateParams::Validate() const {
  if (!(p_success >= 0.0 && p_success <= 1.0)) {
    throw std::invalid_argument("gate.p_success must lie in [0, 1]");
  }
}

std::vector<PhotonSet::Role> PhotonSet::roles() const {
  std::vector<Role> out;
  for (int r = kData1; r <= kAncilla3; ++r) {
    if (Contains(static_cast<Role>(r))) out.push_back(static_cast<Role>(r));
  }
  return out;
}

std::string RoleName(PhotonSet::Role r) {
  switch (r) {
    case PhotonSet::kData1: return "data1";
    case PhotonSet::kData2: return "data2";
    default: return "ancilla" + std::to_string(static_cast<int>(r) - 2);
  }
}

int PhotonsInScope(const GateParams& params, LossScope scope) {
  return 2 + (scope == LossScope::kDataAndAncilla ? params.ancilla_photons() : 0);
}

FusionResult SampleFusion(const GateParams& params, double p_loss, LossScope scope,
                          double outcome_draw, DrawStream& loss_draws) {
  if (p_loss > 0.0) {
    PhotonSet lost;
    const int n = PhotonsInScope(params, scope);
    for (int i = 0; i < n; ++i) {
      if (loss_draws.Next() < p_loss) lost.Add(static_cast<PhotonSet::Role>(i));
    }
    if (!lost.empty()) return FusionResult::Loss(lost);
  }
  return outcome_draw < params.p_success ? FusionResult::Success()
                                         : FusionResult::Failure();
}

FusionResult SampleFusion(const GateParams& params, double p_loss, LossScope scope,
                          const RunRng& rng, std::uint32_t fusion_id,
                          PackedStream& outcomes) {
  DrawStream loss_draws(rng, fusion_id);
  return SampleFusion(params, p_loss, scope, outcomes.At(fusion_id), loss_draws);
}

double EffectiveSuccessProb(const GateParams& params, double p_loss, LossScope scope) {
  return params.p_success * std::pow(1.0 - p_loss, PhotonsInScope(params, scope));
}

}  // namespace fusionperc
