#include "tiling.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pdk {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Center of the box tile containing t for one shape's lattice.
Coords box_center_of(const GroupDescriptor& desc, const CenterLattice& lat,
                     std::span<const std::int64_t> t) {
  Coords c(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const std::int64_t p = lat.periods[i];
    std::int64_t v = lat.offsets[i] + p * floor_div(t[i] - lat.offsets[i], p);
    if (!desc.is_lattice()) {
      v %= desc.modulus();
      if (v < 0) v += desc.modulus();
    }
    c[i] = v;
  }
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// TilingSequence
// ---------------------------------------------------------------------------

TilingSequence::TilingSequence(GroupDescriptor desc, std::vector<Tiling> levels)
    : desc_(desc), levels_(std::move(levels)) {
  if (levels_.empty()) throw invalid_argument("tiling sequence must have depth >= 1");
  for (const auto& lvl : levels_) {
    if (lvl.shapes.empty() || lvl.shapes.size() != lvl.centers.size())
      throw invalid_argument("tiling level must pair shapes with center sets");
    const Coords zero(desc_.rank(), 0);
    for (const auto& s : lvl.shapes)
      if (!s.contains(zero)) throw invalid_argument("tiling shapes must contain the identity");
  }
}

const Tiling& TilingSequence::level(std::size_t k) const {
  if (k < 1 || k > levels_.size())
    throw invalid_argument("tiling level out of range: " + std::to_string(k));
  return levels_[k - 1];
}

TilingSequence TilingSequence::with_corrupted_offset(std::size_t k, const Coords& offset) const {
  TilingSequence out = *this;
  if (k < 1 || k > out.levels_.size()) throw invalid_argument("corrupt level out of range");
  out.levels_[k - 1].centers.at(0).offsets = offset;
  return out;
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

Tiling trivial_tiling(const GroupDescriptor& desc) {
  Tiling t;
  t.shapes.push_back(FinitePart::singleton(desc, Coords(desc.rank(), 0)));
  t.centers.push_back(CenterLattice{Coords(desc.rank(), 1), Coords(desc.rank(), 0)});
  t.k_set = FinitePart::singleton(desc, Coords(desc.rank(), 0));
  t.epsilon = 1.0;
  t.shape_defects.push_back(Ratio{0, 1});
  return t;
}

Tiling whole_group_tiling(const GroupDescriptor& desc) {
  if (desc.is_lattice()) throw invalid_argument("whole-group tiling needs a finite group");
  Tiling t;
  t.shapes.push_back(FinitePart::full_group(desc));
  t.centers.push_back(CenterLattice{Coords(desc.rank(), desc.modulus()), Coords(desc.rank(), 0)});
  t.k_set = FinitePart::singleton(desc, Coords(desc.rank(), 0));
  t.epsilon = 1.0;
  t.shape_defects.push_back(Ratio{0, 1});
  return t;
}

TilingSequence build_box_tiling_sequence(const GroupDescriptor& desc,
                                         std::span<const FinitePart> k_schedule,
                                         std::size_t depth) {
  if (depth < 1) throw invalid_argument("depth must be >= 1");
  if (k_schedule.size() < depth)
    throw invalid_argument("K schedule shorter than requested depth");
  for (std::size_t i = 0; i + 1 < depth; ++i)
    if (!k_schedule[i].subset_of(k_schedule[i + 1]))
      throw invalid_argument("K schedule must be increasing");

  std::vector<Tiling> levels;
  if (desc.is_lattice()) {
    std::int64_t prev_side = 1;
    for (std::size_t k = 1; k <= depth; ++k) {
      const FinitePart& kk = k_schedule[k - 1];
      const double eps = 1.0 / static_cast<double>(k);
      std::int64_t side = prev_side;
      Ratio defect{};
      for (;;) {
        const FinitePart shape = FinitePart::cube(desc, side);
        defect = invariance_defect(kk, shape);
        if (defect.value() < eps) break;
        side += prev_side;
        if (side > (std::int64_t{1} << 30))
          throw invalid_argument("box tiling side overflow; reduce the K schedule");
      }
      Tiling lvl;
      lvl.shapes.push_back(FinitePart::cube(desc, side));
      lvl.centers.push_back(CenterLattice{Coords(desc.rank(), side), Coords(desc.rank(), 0)});
      lvl.k_set = kk;
      lvl.epsilon = eps;
      lvl.shape_defects.push_back(defect);
      levels.push_back(std::move(lvl));
      prev_side = side;
    }
    return TilingSequence(desc, std::move(levels));
  }

  // Cyclic sums: per-coordinate side is 1 or the modulus. Growing the shape
  // to absorb the support of K_k gives defect 0 < 1/k exactly.
  const std::int64_t m = desc.modulus();
  std::int64_t full_coords = 0;
  for (std::size_t k = 1; k <= depth; ++k) {
    const FinitePart& kk = k_schedule[k - 1];
    std::int64_t needed = full_coords;
    for (std::size_t e = 0; e < kk.size(); ++e) {
      auto p = kk.at(e);
      for (std::int64_t i = 0; i < desc.rank(); ++i)
        if (p[i] != 0) needed = std::max(needed, i + 1);
    }
    full_coords = std::min<std::int64_t>(needed, desc.rank());
    Coords periods(desc.rank(), 1);
    Coords hi(desc.rank(), 1);
    for (std::int64_t i = 0; i < full_coords; ++i) {
      periods[i] = m;
      hi[i] = m;
    }
    Tiling lvl;
    lvl.shapes.push_back(FinitePart::box(desc, Coords(desc.rank(), 0), hi));
    lvl.centers.push_back(CenterLattice{periods, Coords(desc.rank(), 0)});
    lvl.k_set = kk;
    lvl.epsilon = 1.0 / static_cast<double>(k);
    lvl.shape_defects.push_back(invariance_defect(kk, lvl.shapes[0]));
    if (lvl.shape_defects[0].value() >= lvl.epsilon)
      throw invalid_argument("cyclic tiling level cannot reach the requested invariance");
    levels.push_back(std::move(lvl));
  }
  return TilingSequence(desc, std::move(levels));
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

TileRef tile_of(const TilingSequence& seq, std::size_t k, std::span<const std::int64_t> t) {
  const Tiling& lvl = seq.level(k);
  const Coords pt = canonicalize(seq.descriptor(), t);
  // Generic path over the shape list; the candidate center from each shape's
  // lattice is accepted iff the translated shape actually contains t.
  for (std::size_t s = 0; s < lvl.shapes.size(); ++s) {
    const Coords c = box_center_of(seq.descriptor(), lvl.centers[s], pt);
    Coords rel(pt.size());
    const std::int64_t m = seq.descriptor().is_lattice() ? 0 : seq.descriptor().modulus();
    for (std::size_t i = 0; i < pt.size(); ++i) {
      rel[i] = pt[i] - c[i];
      if (m != 0) rel[i] = ((rel[i] % m) + m) % m;
    }
    if (lvl.shapes[s].contains(rel)) return TileRef{s, c};
  }
  throw numeric_error("tiling does not cover element: partition violated");
}

FinitePart tile_elements(const TilingSequence& seq, std::size_t k, const TileRef& ref) {
  const Tiling& lvl = seq.level(k);
  return translate(lvl.shapes.at(ref.shape_index), ref.center);
}

bool well_contained(const TilingSequence& seq, std::size_t k, std::span<const std::int64_t> t,
                    const FinitePart& a_set) {
  const TileRef ref = tile_of(seq, k, t);
  const FinitePart tile = tile_elements(seq, k, ref);
  return tile.subset_of(a_set);
}

CongruenceReport verify_congruence(const TilingSequence& seq, const FinitePart& window) {
  CongruenceReport rep;
  auto fail = [&](bool partition, const Coords& witness, std::size_t level, std::string msg) {
    if (partition)
      rep.partition_ok = false;
    else
      rep.congruence_ok = false;
    if (!rep.witness) {
      rep.witness = witness;
      rep.witness_level = level;
      rep.message = std::move(msg);
    }
  };

  std::vector<std::set<Coords>> checked_tiles(seq.depth() + 1);
  for (std::size_t k = 1; k <= seq.depth(); ++k) {
    const Tiling& lvl = seq.level(k);
    for (std::size_t e = 0; e < window.size(); ++e) {
      const auto t = window.at(e);
      const Coords pt(t.begin(), t.end());
      // membership count across all shapes/centers = exactly one
      std::size_t hits = 0;
      for (std::size_t s = 0; s < lvl.shapes.size(); ++s) {
        const Coords c = box_center_of(seq.descriptor(), lvl.centers[s], pt);
        Coords rel(pt.size());
        const std::int64_t m = seq.descriptor().is_lattice() ? 0 : seq.descriptor().modulus();
        for (std::size_t i = 0; i < pt.size(); ++i) {
          rel[i] = pt[i] - c[i];
          if (m != 0) rel[i] = ((rel[i] % m) + m) % m;
        }
        if (lvl.shapes[s].contains(rel)) ++hits;
      }
      if (hits != 1) {
        fail(true, pt, k,
             "element covered by " + std::to_string(hits) + " tiles at level " +
                 std::to_string(k));
        continue;
      }
      if (k < seq.depth()) {
        // congruence: the whole level-k tile must sit inside one level-(k+1)
        // tile; each tile is checked once
        TileRef ref_k, ref_up;
        try {
          ref_k = tile_of(seq, k, pt);
          ref_up = tile_of(seq, k + 1, pt);
        } catch (const numeric_error&) {
          fail(true, pt, k, "partition lookup failed");
          continue;
        }
        Coords memo_key = ref_k.center;
        memo_key.push_back(static_cast<std::int64_t>(ref_k.shape_index));
        if (!checked_tiles[k].insert(memo_key).second) continue;
        const FinitePart tile_k = tile_elements(seq, k, ref_k);
        const FinitePart tile_up = tile_elements(seq, k + 1, ref_up);
        if (!tile_k.subset_of(tile_up))
          fail(false, pt, k,
               "level-" + std::to_string(k) + " tile escapes its level-" +
                   std::to_string(k + 1) + " tile");
      }
    }
  }
  rep.passed = rep.partition_ok && rep.congruence_ok;
  return rep;
}

}  // namespace pdk
