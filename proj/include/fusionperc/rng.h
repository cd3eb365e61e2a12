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

#ifndef FUSIONPERC_RNG_H_
#define FUSIONPERC_RNG_H_

#include <array>
#include <cstdint>

namespace fusionperc {

/// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
///
/// Every random number in a simulation is addressed by a (key, counter)
/// pair, so a draw depends only on its coordinates and never on the order in
/// which other draws were made. This is what makes runs bit-identical across
/// worker counts.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter Block(Counter ctr, Key key) {
    ctr = Round(ctr, key);
#pragma GCC unroll 10
    for (int i = 1; i < 10; ++i) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
      ctr = Round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter Round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Maps a 32-bit word to the open interval (0, 1).
constexpr double ToUnit(std::uint32_t w) {
  return (static_cast<double>(w) + 0.5) * (1.0 / 4294967296.0);
}

/// Random stream for one simulation run: key = experiment seed, counter =
/// (run index, entity id, block). Entities are gates, sites or bonds; each
/// entity owns an independent sequence of uniforms.
class RunRng {
 public:
  RunRng(std::uint64_t seed, std::uint64_t run_index)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        run_lo_(static_cast<std::uint32_t>(run_index)),
        run_hi_(static_cast<std::uint32_t>(run_index >> 32)) {}

  /// Four uniforms for (entity, block).
  std::array<double, 4> Uniforms(std::uint32_t entity,
                                 std::uint32_t block = 0) const {
    const auto w = Philox4x32::Block({run_lo_, run_hi_, entity, block}, key_);
    return {ToUnit(w[0]), ToUnit(w[1]), ToUnit(w[2]), ToUnit(w[3])};
  }

  /// Uniform number `index` of the given entity.
  double Uniform(std::uint32_t entity, std::uint32_t index) const {
    const auto w = Philox4x32::Block({run_lo_, run_hi_, entity, index / 4}, key_);
    return ToUnit(w[index % 4]);
  }

 private:
  Philox4x32::Key key_;
  std::uint32_t run_lo_;
  std::uint32_t run_hi_;
};

/// Uniforms addressed by a single index and packed four to a Philox block,
/// so sequential indices cost a quarter of a block each. Each stream uses
/// block words with the top bit set and never overlaps the per-entity
/// draws above.
class PackedStream {
 public:
  static constexpr std::uint32_t kFusionOutcomes = 0;
  static constexpr std::uint32_t kHeraldedRemoval = 1;
  static constexpr std::uint32_t kCubicBonds = 2;

  PackedStream(const RunRng& rng, std::uint32_t stream)
      : rng_(&rng), tag_(0x80000000u | stream) {}

  double At(std::uint32_t index) {
    const std::uint32_t block = index / 4;
    if (block != cached_) {
      buf_ = rng_->Uniforms(block, tag_);
      cached_ = block;
    }
    return buf_[index % 4];
  }

 private:
  const RunRng* rng_;
  std::uint32_t tag_;
  std::uint32_t cached_ = 0xFFFFFFFFu;
  std::array<double, 4> buf_{};
};

/// Sequential view of one entity's uniforms.
class DrawStream {
 public:
  DrawStream(const RunRng& rng, std::uint32_t entity)
      : rng_(&rng), entity_(entity) {}

  double Next() {
    if (pos_ % 4 == 0) buf_ = rng_->Uniforms(entity_, pos_ / 4);
    return buf_[pos_++ % 4];
  }

  /// Repositions the stream at draw `index`.
  void Seek(std::uint32_t index) {
    pos_ = index;
    if (pos_ % 4 != 0) buf_ = rng_->Uniforms(entity_, pos_ / 4);
  }

 private:
  const RunRng* rng_;
  std::uint32_t entity_;
  std::uint32_t pos_ = 0;
  std::array<double, 4> buf_{};
};

}  // namespace fusionperc

#endif  // FUSIONPERC_RNG_H_
