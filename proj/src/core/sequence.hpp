#pragma once

#include <span>
#include <string>
#include <vector>

#include "group.hpp"
#include "types.hpp"

namespace pdk {

/// Per-level construction statistics recorded by the tiled builder.
struct LevelRecord {
  std::int64_t level = 0;
  std::int64_t tile_side = 0;      // side of the level's box shape (lattice)
  std::int64_t plan_size = 0;      // |F'_k|
  std::int64_t fresh_centers = 0;  // |C_k|
  std::int64_t bad_tiles = 0;
  std::int64_t subtile_fills = 0;  // fresh level-(k-1) tiles inside bad tiles
  std::int64_t covered_points = 0; // sum |S| |C_k(S)|
  double shape_defect = 0.0;
};

struct Provenance {
  std::string builder;  // "tiled" | "blocks"
  std::string mode;     // "strict" | "practical" | "n/a"
  std::string measure_digest;
  SeedRecord seed;
  std::vector<LevelRecord> levels;       // tiled builder
  std::vector<std::int64_t> block_bounds;  // blocks builder: N_0 < N_1 < ...

  /// Independent-draw count backing certificate radii: top-level fresh
  /// centers for tiled sequences, block count for block sequences.
  std::int64_t effective_draws() const {
    if (!levels.empty()) return levels.back().fresh_centers;
    if (block_bounds.size() > 1) return static_cast<std::int64_t>(block_bounds.size()) - 1;
    return 0;
  }
};

/// A modulus-1 sequence on a finite box window with full provenance.
/// Values live in S(G): arbitrary unit complex numbers over lattices, m-th
/// roots of unity over cyclic sums.
class UnimodularSeq {
public:
  UnimodularSeq(GroupDescriptor desc, Coords window_sides, std::vector<cplx> values,
                Provenance prov);

  const GroupDescriptor& descriptor() const { return desc_; }
  /// Window is the box [0, sides_0) x ... x [0, sides_{r-1}).
  const Coords& window_sides() const { return sides_; }
  std::int64_t total() const { return static_cast<std::int64_t>(values_.size()); }
  std::span<const cplx> values() const { return values_; }
  const Provenance& provenance() const { return prov_; }

  bool in_window(std::span<const std::int64_t> coords) const;
  std::int64_t flat_index(std::span<const std::int64_t> coords) const;
  cplx at(std::span<const std::int64_t> coords) const;
  cplx at_flat(std::int64_t idx) const { return values_[static_cast<std::size_t>(idx)]; }

private:
  GroupDescriptor desc_;
  Coords sides_;
  std::vector<cplx> values_;
  Provenance prov_;
};

/// Real doubling of a unimodular sequence: component_1 = sqrt(2) Re(values),
/// component_2 = sqrt(2) Im(values), carried with equal weights 1/2.
struct RealPairSeq {
  GroupDescriptor desc;
  Coords window_sides;
  std::vector<double> component_1;
  std::vector<double> component_2;
};

RealPairSeq realify(const UnimodularSeq& seq);

/// (1/2) avg(c1_{g+h} c1_g) + (1/2) avg(c2_{g+h} c2_g) over g in F; equals
/// the real part of the complex correlation identically.
double paired_correlation(const RealPairSeq& pair, std::span<const std::int64_t> h,
                          const FinitePart& f_set);

}  // namespace pdk
