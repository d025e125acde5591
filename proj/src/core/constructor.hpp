#pragma once

#include <span>
#include <vector>

#include "sequence.hpp"
#include "spectral.hpp"
#include "tiling.hpp"
#include "types.hpp"

namespace pdk {

enum class PlanMode { strict, practical };

struct SubPlanLevel {
  std::int64_t level = 0;
  Coords f_sides;          // F'_k is the box [0, f_sides_0) x ...
  std::int64_t f_size = 0;
  Ratio defect;            // realized defect of S_k - S_k on F'_k
  double defect_bound = 0.0;  // (k |S_k - S_k|)^{-1}
  double size_required = 0.0; // RHS of the enforced size inequality
};

/// Folner subsequence backing the tiled construction. Every level satisfies
/// the (S_k - S_k, (k |S_k - S_k|)^{-1})-invariance condition. Strict mode
/// additionally enforces
///   |F'_k| > k |S_k| |shapes_k| 4k^2 log(k |shapes_k|) + k |F'_{k-1}| |S_k|,
/// practical mode the lighter |F'_k| >= C k |F'_{k-1}| with a user constant
/// (default 16), flagged in provenance.
struct FolnerSubPlan {
  GroupDescriptor desc;
  PlanMode mode = PlanMode::practical;
  double practical_constant = 16.0;
  std::vector<SubPlanLevel> levels;
};

/// Chooses box sets F'_k against the given tilings. final_floor, when
/// positive, additionally raises the last level to at least that many
/// elements (all constraints are lower bounds, so this is always legal).
/// Exceeding memory_cap elements raises an error advising a lower depth or
/// practical mode.
FolnerSubPlan plan_folner_subsequence(const TilingSequence& tilings, PlanMode mode,
                                      std::size_t depth, double practical_constant = 16.0,
                                      std::int64_t final_floor = 0,
                                      std::int64_t memory_cap = std::int64_t{1} << 26);

/// The inductive tiled construction: fresh well-contained tiles at level k
/// take Y_{s+c} = chi(s) for one draw chi = X_c per center; tiles that meet
/// already-defined points are labelled bad and decomposed one level down;
/// F'_1 and never-touched points are set to 1. One draw per center, keyed by
/// the center coordinates, so results are independent of traversal order.
UnimodularSeq build_sequence_tiled(const SpectralMeasure& nu, const TilingSequence& tilings,
                                   const FolnerSubPlan& plan, const SeedRecord& seed);

/// Z-only block specialization: consecutive blocks [N_{k-1}, N_k) with one
/// character draw per block and c_n = chi_k(n - N_{k-1}). Serves as the
/// simple oracle for the tiled builder.
UnimodularSeq build_sequence_blocks(const SpectralMeasure& nu,
                                    std::span<const std::int64_t> block_lengths,
                                    const SeedRecord& seed);

/// Single-box-shape congruent tilings with prescribed sides (each dividing
/// the next); the invariance targets default to the identity singleton.
TilingSequence box_tilings_with_sides(const GroupDescriptor& desc,
                                      std::span<const std::int64_t> sides);

/// Box K-sets for build_box_tiling_sequence: radius r gives [-r, r]^d over
/// lattices; over cyclic sums r counts the leading full coordinates.
std::vector<FinitePart> default_k_schedule(const GroupDescriptor& desc,
                                           std::span<const std::int64_t> radii);

}  // namespace pdk
