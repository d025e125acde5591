#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "group.hpp"
#include "types.hpp"

namespace pdk {

/// Center set of one shape: the per-coordinate sublattice
/// offset + (period_0 Z) x ... x (period_{r-1} Z). Over cyclic sums each
/// period divides the modulus.
struct CenterLattice {
  Coords periods;
  Coords offsets;
};

/// One tiling of the group. Shapes are finite sets containing the identity;
/// the realized constructors produce a single box shape per level, but all
/// queries treat the shape list generically.
struct Tiling {
  std::vector<FinitePart> shapes;
  std::vector<CenterLattice> centers;
  /// Invariance target for this level and the realized defect of each shape.
  FinitePart k_set;
  double epsilon = 0.0;
  std::vector<Ratio> shape_defects;
};

struct TileRef {
  std::size_t shape_index = 0;
  Coords center;
};

/// A congruent sequence of tilings: every tile of level k+1 is a union of
/// level-k tiles, and the level-k shapes are (K_k, 1/k)-invariant.
class TilingSequence {
public:
  TilingSequence(GroupDescriptor desc, std::vector<Tiling> levels);

  const GroupDescriptor& descriptor() const { return desc_; }
  std::size_t depth() const { return levels_.size(); }
  /// 1-based access.
  const Tiling& level(std::size_t k) const;

  /// Testing hook: returns a copy with the offset of one level's first shape
  /// replaced, deliberately breaking the partition/congruence invariants.
  TilingSequence with_corrupted_offset(std::size_t k, const Coords& offset) const;

private:
  GroupDescriptor desc_;
  std::vector<Tiling> levels_;
};

/// Single-box-shape congruent tilings: level k uses shape [0, L_k)^d with
/// L_{k-1} | L_k and L_k large enough that the invariance defect against
/// K_schedule[k-1] is below 1/k. Over cyclic sums the per-coordinate side is
/// either 1 or the modulus, growing until the K set fits inside the shape.
TilingSequence build_box_tiling_sequence(const GroupDescriptor& desc,
                                         std::span<const FinitePart> k_schedule,
                                         std::size_t depth);

/// The trivial tiling ({0} shapes, every element a center).
Tiling trivial_tiling(const GroupDescriptor& desc);
/// The whole (finite) group as a single tile; cyclic sums only.
Tiling whole_group_tiling(const GroupDescriptor& desc);

/// The unique tile containing t at level k.
TileRef tile_of(const TilingSequence& seq, std::size_t k, std::span<const std::int64_t> t);
/// Enumerated elements of a tile (shape translated to its center).
FinitePart tile_elements(const TilingSequence& seq, std::size_t k, const TileRef& ref);
/// True iff the whole tile containing t lies inside A.
bool well_contained(const TilingSequence& seq, std::size_t k, std::span<const std::int64_t> t,
                    const FinitePart& a_set);

struct CongruenceReport {
  bool partition_ok = true;
  bool congruence_ok = true;
  bool passed = true;
  std::optional<Coords> witness;
  std::size_t witness_level = 0;
  std::string message;
};

/// Exhaustive check on a finite window: every element lies in exactly one
/// tile per level, and every level-k tile meeting the window lies inside a
/// single level-(k+1) tile. Failures are reported with a witness element,
/// never thrown.
CongruenceReport verify_congruence(const TilingSequence& seq, const FinitePart& window);

}  // namespace pdk
