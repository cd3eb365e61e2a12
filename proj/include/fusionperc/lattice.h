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

#ifndef FUSIONPERC_LATTICE_H_
#define FUSIONPERC_LATTICE_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fusionperc/fusion.h"
#include "fusionperc/microcluster.h"
#include "fusionperc/rng.h"

namespace fusionperc {

struct Dims {
  int lx = 1;
  int ly = 1;
  int lz = 1;

  std::size_t site_count() const {
    return static_cast<std::size_t>(lx) * static_cast<std::size_t>(ly) *
           static_cast<std::size_t>(lz);
  }
  /// Throws std::invalid_argument unless every side is >= 1.
  void Validate() const;
  static Dims Cube(int l) { return {l, l, l}; }

  friend bool operator==(const Dims&, const Dims&) = default;
};

struct SiteCoord {
  int x = 0;
  int y = 0;
  int z = 0;

  int parity() const { return ((x + y + z) % 2 + 2) % 2; }
  bool InRange(const Dims& d) const {
    return x >= 0 && y >= 0 && z >= 0 && x < d.lx && y < d.ly && z < d.lz;
  }

  friend bool operator==(const SiteCoord&, const SiteCoord&) = default;
};

inline std::uint32_t SiteIndex(const SiteCoord& c, const Dims& d) {
  return static_cast<std::uint32_t>(c.x + d.lx * (c.y + d.ly * c.z));
}

inline SiteCoord CoordOf(std::uint32_t s, const Dims& d) {
  const int i = static_cast<int>(s);
  return {i % d.lx, (i / d.lx) % d.ly, i / (d.lx * d.ly)};
}

/// In-range neighbors of `c` and the slot of `c` that faces each one.
/// -X/+X go to x-1/x+1. Parity-0 sites send T1 to y+1 and T2 to z+1,
/// parity-1 sites send T1 to y-1 and T2 to z-1. Throws if c is out of range.
std::vector<std::pair<SiteCoord, ArmSlot>> Neighbors(const SiteCoord& c, const Dims& d);

/// Slot on the far site that faces back along a bond leaving via `s`.
inline ArmSlot MatchingSlot(ArmSlot s) {
  switch (s) {
    case ArmSlot::kMinusX: return ArmSlot::kPlusX;
    case ArmSlot::kPlusX: return ArmSlot::kMinusX;
    default: return s;
  }
}

bool LatticeAdjacent(const SiteCoord& a, const SiteCoord& b, const Dims& d);

/// Geometric bonds are numbered 3 * owner + kind. Kind 0 is the +X bond of
/// the lower-x site; kinds 1 and 2 are the T1 and T2 bonds of a parity-0
/// site. Ports are numbered 4 * site + slot.
struct GeometricBond {
  std::uint32_t id;
  std::uint32_t owner_port;
  std::uint32_t other_port;
};

/// Enumerates every in-range geometric bond in ascending id order.
std::vector<GeometricBond> GeometricBonds(const Dims& d);

inline std::uint32_t PortOf(std::uint32_t site, ArmSlot s) {
  return 4 * site + static_cast<std::uint32_t>(SlotIndex(s));
}

enum class LossMode { kUnheralded, kHeralded };

/// What happens when a loss is detected in a fusion between sites.
enum class BondLossRemedy {
  kCutBoth,   // Z-cut the center-side neighbor of both fused arms
  kCutLost,   // Z-cut only next to the lost data photons
  kVoidBond,  // the bond is simply absent
};

std::string_view LossModeName(LossMode m);
std::optional<LossMode> ParseLossMode(std::string_view s);
std::string_view RemedyName(BondLossRemedy r);
std::optional<BondLossRemedy> ParseRemedy(std::string_view s);
std::string_view ScopeName(LossScope s);
std::optional<LossScope> ParseScope(std::string_view s);

struct LossSpec {
  double p_loss = 0.0;
  /// Every photon measured in a gate, ancillas included, can be lost.
  LossScope scope = LossScope::kDataAndAncilla;
  LossMode mode = LossMode::kUnheralded;
  BondLossRemedy remedy = BondLossRemedy::kCutBoth;

  void Validate() const;
  /// Loss probability seen by the gates (zero in heralded mode, where loss
  /// is applied to the finished lattice instead).
  double gate_loss() const { return mode == LossMode::kUnheralded ? p_loss : 0.0; }
};

enum class Provenance : std::uint8_t { kLattice, kDiagonal };

std::string_view ProvenanceName(Provenance p);

struct Bond {
  std::uint32_t a;
  std::uint32_t b;
  Provenance provenance;
  /// Detached-pair ports the bond runs through, as a range of
  /// PercolationGraph::via. Empty for direct bonds.
  std::uint32_t via_begin = 0;
  std::uint32_t via_count = 0;
};

struct PercolationGraph {
  Dims dims;
  std::vector<SiteOutcome> sites;
  std::vector<Bond> bonds;
  /// Sites excised by loss processing (Z-cut centers, heralded removals).
  std::vector<std::uint8_t> removed;
  std::vector<std::uint32_t> via;

  bool live(std::uint32_t s) const { return sites[s].center_alive() && !removed[s]; }
  std::size_t CountBonds(Provenance p) const;
  std::size_t RemovedCount() const;
  /// Drops bonds that touch a removed or dead site.
  void PruneBonds();
  /// Bonds reference live sites and diagonal bonds join non-adjacent sites.
  bool Consistent() const;
};

/// Fusion outcomes for every geometric bond, indexed by bond id (entries of
/// ids that are not in range are ignored).
using BondResults = std::vector<FusionResult>;

/// Deterministic assembly from given site outcomes and bond fusion results.
/// Loss remedies act on the post-internal structure before any bond is
/// formed; a successful fusion links two ports only if both are still live;
/// chains of links through detached pairs become diagonal bonds.
PercolationGraph AssembleInstance(const Dims& d, std::vector<SiteOutcome> sites,
                                  const BondResults& bonds,
                                  BondLossRemedy remedy = BondLossRemedy::kCutBoth);

/// Gate numbering within one run of N sites: internal fusions 2s+side,
/// bond fusions 2N + bond id. Heralded removal of site s is index s of its
/// own packed stream.
inline std::uint32_t BondEntity(std::size_t n_sites, std::uint32_t bond_id) {
  return static_cast<std::uint32_t>(2 * n_sites) + bond_id;
}

struct InstanceParams {
  Dims dims;
  /// gate.failure_basis governs the internal fusions; failed fusions
  /// between sites act as Z x Z on the arms.
  GateParams gate;
  LossSpec loss;
  ArmAssignment assignment;

  void Validate() const;
};

/// Scratch buffers reused across instances by a worker.
struct InstanceScratch {
  std::vector<FusionResult> bond_results;
  std::vector<std::int32_t> link;
  std::vector<std::uint8_t> port_killed;
};

/// Samples one instance: sites, bond fusions, loss remedies, and (heralded
/// mode) site removal.
PercolationGraph BuildInstance(const InstanceParams& params, const RunRng& rng);
void BuildInstance(const InstanceParams& params, const RunRng& rng, InstanceScratch& scratch,
                   PercolationGraph& out);

/// Location of a lost photon in the finished structure.
struct LostPhoton {
  enum class Kind { kCenter, kArm };
  std::uint32_t site;
  Kind kind;
  ArmSlot slot = ArmSlot::kMinusX;
};

/// Lost center: it and every site bonded to it are cut. Lost arm: its
/// center-side neighbor is cut, i.e. the center for an attached arm, or the
/// partner for a detached-pair arm, which voids the bonds running through
/// that pair.
void ApplyUnheraldedLoss(PercolationGraph& g, const std::vector<LostPhoton>& lost);

/// Removes each site independently with probability p_loss.
void ApplyHeraldedLoss(PercolationGraph& g, double p_loss, const RunRng& rng);

/// Instance dump: `dims lx ly lz`, then `site x y z class`, then
/// `bond x1 y1 z1 x2 y2 z2 provenance`.
void WriteInstance(std::ostream& os, const PercolationGraph& g);

}  // namespace fusionperc

#endif  // FUSIONPERC_LATTICE_H_
