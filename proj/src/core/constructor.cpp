#include "constructor.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "rng.hpp"

namespace pdk {

namespace {

std::int64_t product(std::span<const std::int64_t> v) {
  std::int64_t p = 1;
  for (auto x : v) p *= x;
  return p;
}

// Exact |KF symdiff F| / |F| for lattice boxes without materializing them.
Ratio box_defect(std::span<const std::int64_t> k_lo, std::span<const std::int64_t> k_hi,
                 std::int64_t f_side, std::size_t rank) {
  std::int64_t f_vol = 1, kf_vol = 1, inter = 1;
  for (std::size_t i = 0; i < rank; ++i) {
    const std::int64_t lo = k_lo[i];            // KF spans [k_lo, f_side-1 + k_hi-1]
    const std::int64_t hi = k_hi[i] + f_side - 1;  // half-open
    f_vol *= f_side;
    kf_vol *= hi - lo;
    const std::int64_t olo = std::max<std::int64_t>(lo, 0);
    const std::int64_t ohi = std::min<std::int64_t>(hi, f_side);
    inter *= std::max<std::int64_t>(0, ohi - olo);
  }
  return Ratio{kf_vol + f_vol - 2 * inter, f_vol};
}

}  // namespace

std::vector<FinitePart> default_k_schedule(const GroupDescriptor& desc,
                                           std::span<const std::int64_t> radii) {
  std::vector<FinitePart> out;
  out.reserve(radii.size());
  for (std::int64_t r : radii) {
    if (desc.is_lattice()) {
      out.push_back(FinitePart::box(desc, Coords(desc.rank(), -r), Coords(desc.rank(), r + 1)));
    } else {
      const std::int64_t leading = std::clamp<std::int64_t>(r, 1, desc.rank());
      Coords hi(desc.rank(), 1);
      for (std::int64_t i = 0; i < leading; ++i) hi[i] = desc.modulus();
      out.push_back(FinitePart::box(desc, Coords(desc.rank(), 0), hi));
    }
  }
  return out;
}

TilingSequence box_tilings_with_sides(const GroupDescriptor& desc,
                                      std::span<const std::int64_t> sides) {
  if (!desc.is_lattice())
    throw invalid_argument("box_tilings_with_sides supports lattices; use "
                           "build_box_tiling_sequence for cyclic sums");
  std::vector<Tiling> levels;
  std::int64_t prev = 1;
  for (std::size_t k = 0; k < sides.size(); ++k) {
    const std::int64_t side = sides[k];
    if (side < 1 || side % prev != 0)
      throw invalid_argument("tiling sides must be positive and divide the next level");
    Tiling lvl;
    lvl.shapes.push_back(FinitePart::cube(desc, side));
    lvl.centers.push_back(CenterLattice{Coords(desc.rank(), side), Coords(desc.rank(), 0)});
    lvl.k_set = FinitePart::singleton(desc, Coords(desc.rank(), 0));
    lvl.epsilon = 1.0 / static_cast<double>(k + 1);
    lvl.shape_defects.push_back(Ratio{0, 1});
    levels.push_back(std::move(lvl));
    prev = side;
  }
  return TilingSequence(desc, std::move(levels));
}

FolnerSubPlan plan_folner_subsequence(const TilingSequence& tilings, PlanMode mode,
                                      std::size_t depth, double practical_constant,
                                      std::int64_t final_floor, std::int64_t memory_cap) {
  if (depth < 1 || depth > tilings.depth())
    throw invalid_argument("plan depth must satisfy 1 <= depth <= tiling depth");
  if (practical_constant <= 0.0) throw invalid_argument("practical constant must be positive");

  const GroupDescriptor& desc = tilings.descriptor();
  FolnerSubPlan plan;
  plan.desc = desc;
  plan.mode = mode;
  plan.practical_constant = practical_constant;

  std::int64_t prev_size = 0;

  for (std::size_t k = 1; k <= depth; ++k) {
    const Tiling& lvl = tilings.level(k);
    // S_k = union of the level's shapes; single box in the realized case.
    FinitePart s_union = lvl.shapes[0];
    for (std::size_t s = 1; s < lvl.shapes.size(); ++s) {
      std::vector<Coords> elems;
      for (std::size_t e = 0; e < s_union.size(); ++e) {
        auto p = s_union.at(e);
        elems.emplace_back(p.begin(), p.end());
      }
      for (std::size_t e = 0; e < lvl.shapes[s].size(); ++e) {
        auto p = lvl.shapes[s].at(e);
        elems.emplace_back(p.begin(), p.end());
      }
      s_union = FinitePart(desc, std::move(elems));
    }
    const FinitePart diff_set = minkowski_sum(s_union, negate(s_union));
    const double bound =
        1.0 / (static_cast<double>(k) * static_cast<double>(diff_set.size()));
    const std::int64_t s_size = static_cast<std::int64_t>(s_union.size());
    const std::int64_t n_shapes = static_cast<std::int64_t>(lvl.shapes.size());

    double size_required = 1.0;
    if (mode == PlanMode::strict) {
      size_required = static_cast<double>(k) * static_cast<double>(s_size) *
                          static_cast<double>(n_shapes) * 4.0 * static_cast<double>(k) *
                          static_cast<double>(k) *
                          std::log(static_cast<double>(k) * static_cast<double>(n_shapes)) +
                      static_cast<double>(k) * static_cast<double>(prev_size) *
                          static_cast<double>(s_size);
    } else {
      size_required = k == 1 ? 1.0
                             : practical_constant * static_cast<double>(k) *
                                   static_cast<double>(prev_size);
    }

    SubPlanLevel out;
    out.level = static_cast<std::int64_t>(k);
    out.defect_bound = bound;
    out.size_required = size_required;

    if (desc.is_lattice()) {
      if (!diff_set.is_box())
        throw invalid_argument("plan_folner_subsequence expects box difference sets");
      const Coords& dlo = diff_set.box_lo();
      const Coords& dhi = diff_set.box_hi();
      auto defect_at = [&](std::int64_t n) {
        return box_defect(dlo, dhi, n, static_cast<std::size_t>(desc.rank()));
      };
      auto size_of = [&](std::int64_t n) {
        double v = 1.0;
        for (std::int64_t i = 0; i < desc.rank(); ++i) v *= static_cast<double>(n);
        return v;
      };
      const std::int64_t side_cap = static_cast<std::int64_t>(
          std::floor(std::pow(static_cast<double>(memory_cap),
                              1.0 / static_cast<double>(desc.rank()))));

      // binary search the least cube side meeting the invariance bound
      std::int64_t lo = 1, hi = 1;
      while (defect_at(hi).value() >= bound) {
        hi *= 2;
        if (hi > side_cap)
          throw invalid_argument(
              "planned Folner set exceeds the memory cap; lower the depth or switch mode");
      }
      while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (defect_at(mid).value() < bound)
          hi = mid;
        else
          lo = mid + 1;
      }
      std::int64_t side = lo;

      double size_floor = size_required;
      if (prev_size > 0) size_floor = std::max(size_floor, static_cast<double>(prev_size));
      if (k == depth && final_floor > 0)
        size_floor = std::max(size_floor, static_cast<double>(final_floor));
      side = std::max(side, static_cast<std::int64_t>(std::floor(std::pow(
                                std::max(size_floor, 1.0),
                                1.0 / static_cast<double>(desc.rank())))) -
                                2);
      auto size_ok = [&](std::int64_t n) {
        const double v = size_of(n);
        const bool grows = prev_size == 0 || v > static_cast<double>(prev_size);
        const bool meets = mode == PlanMode::strict ? v > size_required : v >= size_required;
        const bool floor_ok =
            k != depth || final_floor <= 0 || v >= static_cast<double>(final_floor);
        return grows && meets && floor_ok;
      };
      while (!size_ok(side)) ++side;
      if (side > side_cap || size_of(side) > static_cast<double>(memory_cap))
        throw invalid_argument(
            "planned Folner set exceeds the memory cap; lower the depth or switch mode");

      out.f_sides = Coords(desc.rank(), side);
      out.f_size = product(out.f_sides);
      out.defect = defect_at(side);
    } else {
      // cyclic sums: F'_k is a box with leading coordinates full; the
      // difference set of a subgroup box is the box itself, so the
      // invariance defect vanishes once the shape fits inside F'_k.
      const std::int64_t m = desc.modulus();
      std::int64_t leading = 0;
      for (std::int64_t i = 0; i < desc.rank(); ++i)
        if (lvl.centers[0].periods[i] == m) leading = i + 1;
      std::int64_t j = leading;
      auto size_with = [&](std::int64_t jj) {
        double v = 1.0;
        for (std::int64_t i = 0; i < jj; ++i) v *= static_cast<double>(m);
        return v;
      };
      auto ok = [&](std::int64_t jj) {
        const double v = size_with(jj);
        const bool grows = prev_size == 0 || v > static_cast<double>(prev_size);
        const double need = k == depth && final_floor > 0
                                ? std::max(size_required, static_cast<double>(final_floor))
                                : size_required;
        if (mode == PlanMode::strict) return v > need && grows;
        return v >= need && grows;
      };
      while (j <= desc.rank() && !ok(j)) ++j;
      if (j > desc.rank())
        throw invalid_argument(
            "cyclic truncation too short for the requested plan; lower the depth or switch mode");
      if (size_with(j) > static_cast<double>(memory_cap))
        throw invalid_argument(
            "planned Folner set exceeds the memory cap; lower the depth or switch mode");
      out.f_sides = Coords(desc.rank(), 1);
      for (std::int64_t i = 0; i < j; ++i) out.f_sides[i] = m;
      out.f_size = product(out.f_sides);
      const FinitePart f_box = FinitePart::box(desc, Coords(desc.rank(), 0), out.f_sides);
      out.defect = invariance_defect(diff_set, f_box);
      if (out.defect.value() >= bound)
        throw invalid_argument("cyclic plan cannot meet the invariance bound at level " +
                               std::to_string(k));
    }

    prev_size = out.f_size;
    plan.levels.push_back(std::move(out));
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Tiled builder
// ---------------------------------------------------------------------------

namespace {

// Character evaluation table along one axis: chi(s * e_axis) for s in [0, n).
std::vector<cplx> axis_powers(const Character& chi, std::size_t axis, std::int64_t n) {
  std::vector<cplx> tab(static_cast<std::size_t>(n));
  Coords unit(chi.desc.rank(), 0);
  unit[axis] = 1;
  const cplx step = char_eval(chi, unit);
  cplx v(1.0, 0.0);
  for (std::int64_t s = 0; s < n; ++s) {
    tab[static_cast<std::size_t>(s)] = v;
    v *= step;
  }
  return tab;
}

}  // namespace

UnimodularSeq build_sequence_tiled(const SpectralMeasure& nu, const TilingSequence& tilings,
                                   const FolnerSubPlan& plan, const SeedRecord& seed) {
  const GroupDescriptor& desc = plan.desc;
  if (!(nu.descriptor() == desc) || !(tilings.descriptor() == desc))
    throw invalid_argument("build_sequence_tiled: descriptor mismatch");
  if (plan.levels.empty() || plan.levels.size() > tilings.depth())
    throw invalid_argument("build_sequence_tiled: plan depth incompatible with tilings");
  for (std::size_t k = 1; k <= plan.levels.size(); ++k) {
    if (tilings.level(k).shapes.size() != 1)
      throw invalid_argument("tiled builder requires single-shape levels");
    for (std::int64_t off : tilings.level(k).centers[0].offsets)
      if (off != 0) throw invalid_argument("tiled builder requires zero tiling offsets");
  }

  const std::size_t depth = plan.levels.size();
  const std::size_t rank = static_cast<std::size_t>(desc.rank());
  const Coords window = plan.levels.back().f_sides;
  const std::int64_t total = product(window);

  std::vector<cplx> values(static_cast<std::size_t>(total), cplx(1.0, 0.0));
  std::vector<std::uint8_t> defined(static_cast<std::size_t>(total), 0);

  auto flat = [&](std::span<const std::int64_t> c) {
    std::int64_t idx = 0;
    for (std::size_t i = 0; i < rank; ++i) idx = idx * window[i] + c[i];
    return static_cast<std::size_t>(idx);
  };

  Provenance prov;
  prov.builder = "tiled";
  prov.mode = plan.mode == PlanMode::strict ? "strict" : "practical";
  prov.measure_digest = nu.digest();
  prov.seed = seed;

  // base level: Y = 1 on F'_1 (deterministic choice of "arbitrary")
  {
    const Coords& f1 = plan.levels[0].f_sides;
    Coords c(rank, 0);
    for (;;) {
      defined[flat(c)] = 1;
      std::int64_t axis = static_cast<std::int64_t>(rank) - 1;
      while (axis >= 0) {
        if (++c[static_cast<std::size_t>(axis)] < f1[static_cast<std::size_t>(axis)]) break;
        c[static_cast<std::size_t>(axis)] = 0;
        --axis;
      }
      if (axis < 0) break;
    }
    LevelRecord rec;
    rec.level = 1;
    rec.tile_side = tilings.level(1).centers[0].periods[0];
    rec.plan_size = plan.levels[0].f_size;
    rec.covered_points = plan.levels[0].f_size;
    rec.shape_defect = plan.levels[0].defect.value();
    prov.levels.push_back(rec);
  }

  // fills one tile [c, c+periods) from a single draw keyed by its center
  auto fill_tile = [&](std::span<const std::int64_t> center,
                       std::span<const std::int64_t> periods) {
    Rng rng = Rng::keyed(seed, center);
    const Character chi = nu.sample_one(rng);
    std::vector<std::vector<cplx>> pow(rank);
    for (std::size_t i = 0; i < rank; ++i) pow[i] = axis_powers(chi, i, periods[i]);
    Coords s(rank, 0), g(rank);
    for (;;) {
      cplx v(1.0, 0.0);
      for (std::size_t i = 0; i < rank; ++i) v *= pow[i][static_cast<std::size_t>(s[i])];
      for (std::size_t i = 0; i < rank; ++i) g[i] = center[i] + s[i];
      const std::size_t idx = flat(g);
      values[idx] = v;
      defined[idx] = 1;
      std::int64_t axis = static_cast<std::int64_t>(rank) - 1;
      while (axis >= 0) {
        if (++s[static_cast<std::size_t>(axis)] < periods[static_cast<std::size_t>(axis)]) break;
        s[static_cast<std::size_t>(axis)] = 0;
        --axis;
      }
      if (axis < 0) break;
    }
  };

  auto tile_state = [&](std::span<const std::int64_t> center,
                        std::span<const std::int64_t> periods) {
    // 0 fresh, 1 touched (some defined), 2 fully defined
    bool any = false, all = true;
    Coords s(rank, 0), g(rank);
    for (;;) {
      for (std::size_t i = 0; i < rank; ++i) g[i] = center[i] + s[i];
      if (defined[flat(g)])
        any = true;
      else
        all = false;
      std::int64_t axis = static_cast<std::int64_t>(rank) - 1;
      while (axis >= 0) {
        if (++s[static_cast<std::size_t>(axis)] < periods[static_cast<std::size_t>(axis)]) break;
        s[static_cast<std::size_t>(axis)] = 0;
        --axis;
      }
      if (axis < 0) break;
    }
    return any ? (all ? 2 : 1) : 0;
  };

  for (std::size_t k = 2; k <= depth; ++k) {
    const Coords& fk = plan.levels[k - 1].f_sides;
    const Coords& periods = tilings.level(k).centers[0].periods;
    const Coords& sub_periods = tilings.level(k - 1).centers[0].periods;
    LevelRecord rec;
    rec.level = static_cast<std::int64_t>(k);
    rec.tile_side = periods[0];
    rec.plan_size = plan.levels[k - 1].f_size;
    rec.shape_defect = plan.levels[k - 1].defect.value();

    // iterate tiles [c, c+periods) well contained in the box F'_k
    Coords c(rank, 0);
    bool tile_fits = true;
    for (std::size_t i = 0; i < rank; ++i) tile_fits = tile_fits && periods[i] <= fk[i];
    if (tile_fits) {
      for (;;) {
        const int state = tile_state(c, periods);
        if (state == 0) {
          fill_tile(c, periods);
          rec.fresh_centers += 1;
          rec.covered_points += product(periods);
        } else {
          rec.bad_tiles += 1;
          // one-level descent: fill the fully-undefined level-(k-1) tiles
          Coords sc = c;
          for (;;) {
            if (tile_state(sc, sub_periods) == 0) {
              fill_tile(sc, sub_periods);
              rec.subtile_fills += 1;
            }
            std::int64_t axis = static_cast<std::int64_t>(rank) - 1;
            while (axis >= 0) {
              sc[static_cast<std::size_t>(axis)] += sub_periods[static_cast<std::size_t>(axis)];
              if (sc[static_cast<std::size_t>(axis)] + sub_periods[static_cast<std::size_t>(axis)] <=
                  c[static_cast<std::size_t>(axis)] + periods[static_cast<std::size_t>(axis)])
                break;
              sc[static_cast<std::size_t>(axis)] = c[static_cast<std::size_t>(axis)];
              --axis;
            }
            if (axis < 0) break;
          }
        }
        // advance to the next well-contained tile
        std::int64_t axis = static_cast<std::int64_t>(rank) - 1;
        while (axis >= 0) {
          c[static_cast<std::size_t>(axis)] += periods[static_cast<std::size_t>(axis)];
          if (c[static_cast<std::size_t>(axis)] + periods[static_cast<std::size_t>(axis)] <=
              fk[static_cast<std::size_t>(axis)])
            break;
          c[static_cast<std::size_t>(axis)] = 0;
          --axis;
        }
        if (axis < 0) break;
      }
    }

    if (rec.bad_tiles > plan.levels[k - 2].f_size)
      throw numeric_error("tiled builder: bad-tile count exceeds |F'_{k-1}|");
    if (plan.mode == PlanMode::strict) {
      const double needed =
          (1.0 - 2.0 / static_cast<double>(k)) * static_cast<double>(plan.levels[k - 1].f_size);
      if (static_cast<double>(rec.covered_points) <= needed)
        throw numeric_error("tiled builder: coverage shortfall at level " + std::to_string(k));
    }
    prov.levels.push_back(rec);
  }

  return UnimodularSeq(desc, window, std::move(values), std::move(prov));
}

UnimodularSeq build_sequence_blocks(const SpectralMeasure& nu,
                                    std::span<const std::int64_t> block_lengths,
                                    const SeedRecord& seed) {
  const GroupDescriptor& desc = nu.descriptor();
  if (!desc.is_lattice() || desc.rank() != 1)
    throw invalid_argument("build_sequence_blocks is defined over Z only");
  if (block_lengths.empty()) throw invalid_argument("need at least one block");
  for (std::size_t i = 0; i + 1 < block_lengths.size(); ++i)
    if (block_lengths[i + 1] <= block_lengths[i])
      throw invalid_argument("non-increasing blocks");
  if (block_lengths[0] < 1) throw invalid_argument("block lengths must be positive");

  Provenance prov;
  prov.builder = "blocks";
  prov.mode = "n/a";
  prov.measure_digest = nu.digest();
  prov.seed = seed;
  prov.block_bounds.push_back(0);

  std::int64_t total = 0;
  for (auto l : block_lengths) {
    total += l;
    prov.block_bounds.push_back(total);
  }

  std::vector<cplx> values(static_cast<std::size_t>(total));
  std::int64_t start = 0;
  for (std::size_t b = 0; b < block_lengths.size(); ++b) {
    Rng rng = Rng::keyed(seed, std::array<std::int64_t, 2>{static_cast<std::int64_t>(b), start});
    const Character chi = nu.sample_one(rng);
    Coords unit{1};
    const cplx step = char_eval(chi, unit);
    cplx v(1.0, 0.0);
    for (std::int64_t n = 0; n < block_lengths[b]; ++n) {
      values[static_cast<std::size_t>(start + n)] = v;
      v *= step;
    }
    start += block_lengths[b];
  }

  return UnimodularSeq(desc, Coords{total}, std::move(values), std::move(prov));
}

}  // namespace pdk
