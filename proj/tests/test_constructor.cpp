#include <doctest.h>

#include <cmath>

#include "core/constructor.hpp"
#include "core/estimator.hpp"

using namespace pdk;

namespace {

const GroupDescriptor Z = GroupDescriptor::lattice(1);

SpectralMeasure point_mass_z(double theta) {
  return SpectralMeasure::point_mass(Character{Z, {theta}, {}});
}

SpectralMeasure two_atom_half() {
  return SpectralMeasure::make(
      Z, {{Character{Z, {0.0}, {}}, 0.5}, {Character{Z, {0.5}, {}}, 0.5}}, {}, {}, 0.0);
}

}  // namespace

TEST_CASE("strict plan sizes for dyadic tilings") {
  // tiles 2 | 4 | 8; the size recursion and the invariance bound give
  // |F'| = 7, 145, 4430 (arithmetic oracle in the comments below)
  const TilingSequence tilings = box_tilings_with_sides(Z, std::vector<std::int64_t>{2, 4, 8});
  const FolnerSubPlan plan = plan_folner_subsequence(tilings, PlanMode::strict, 3);
  REQUIRE(plan.levels.size() == 3);
  // k=1: only 2/n < 1/3 binds -> 7
  CHECK(plan.levels[0].f_size == 7);
  // k=2: 2*4*16 ln2 + 2*7*4 = 144.7 -> 145 (invariance needs just 85)
  CHECK(plan.levels[1].f_size == 145);
  // k=3: 24*36 ln3 + 3*145*8 = 4429.2 -> 4430
  CHECK(plan.levels[2].f_size == 4430);
  for (const auto& lvl : plan.levels) {
    CHECK(lvl.defect.value() < lvl.defect_bound);
    CHECK(static_cast<double>(lvl.f_size) > lvl.size_required);
  }
}

TEST_CASE("practical plans") {
  SUBCASE("depth 1 binds only the invariance condition") {
    const TilingSequence tilings = box_tilings_with_sides(Z, std::vector<std::int64_t>{2});
    const FolnerSubPlan plan = plan_folner_subsequence(tilings, PlanMode::practical, 1);
    CHECK(plan.levels[0].f_size == 7);
  }

  SUBCASE("depth 6 with constant 2 stays under 10^7 points") {
    const auto schedule =
        default_k_schedule(Z, std::vector<std::int64_t>{1, 2, 3, 4, 5, 6});
    const TilingSequence tilings = build_box_tiling_sequence(Z, schedule, 6);
    const FolnerSubPlan plan =
        plan_folner_subsequence(tilings, PlanMode::practical, 6, 2.0, 0,
                                std::int64_t{1} << 25);
    CHECK(plan.levels.back().f_size <= 10000000);
    for (std::size_t k = 2; k <= 6; ++k)
      CHECK(plan.levels[k - 1].f_size >=
            2.0 * static_cast<double>(k) * plan.levels[k - 2].f_size);
  }

  SUBCASE("final floor raises the last level only") {
    const TilingSequence tilings = box_tilings_with_sides(Z, std::vector<std::int64_t>{2, 4});
    const FolnerSubPlan plan =
        plan_folner_subsequence(tilings, PlanMode::practical, 2, 16.0, 5000);
    CHECK(plan.levels[1].f_size >= 5000);
    CHECK(plan.levels[1].defect.value() < plan.levels[1].defect_bound);
  }

  SUBCASE("memory cap errors with guidance") {
    const TilingSequence tilings = box_tilings_with_sides(Z, std::vector<std::int64_t>{2, 4});
    CHECK_THROWS_WITH_AS(
        plan_folner_subsequence(tilings, PlanMode::strict, 2, 16.0, 0, 100),
        doctest::Contains("lower the depth or switch mode"), invalid_argument);
  }
}

TEST_CASE("tiled builder") {
  const TilingSequence tilings = box_tilings_with_sides(Z, std::vector<std::int64_t>{2, 4, 8});
  const FolnerSubPlan plan = plan_folner_subsequence(tilings, PlanMode::strict, 3);
  const SeedRecord seed{.seed = 101, .stream = 0};

  SUBCASE("trivial-character measure gives the constant sequence") {
    const UnimodularSeq seq = build_sequence_tiled(point_mass_z(0.0), tilings, plan, seed);
    for (std::int64_t i = 0; i < seq.total(); ++i)
      CHECK(std::abs(seq.at_flat(i) - cplx(1.0, 0.0)) < 1e-12);
  }

  SUBCASE("point mass fills fresh tiles with phase ramps") {
    const double theta = std::sqrt(2.0) - 1.0;
    const UnimodularSeq seq = build_sequence_tiled(point_mass_z(theta), tilings, plan, seed);
    const cplx step = std::exp(cplx(0.0, kTwoPi * theta));
    // within any one level-3 tile in the fresh region, consecutive values
    // differ by exactly the character step
    const std::int64_t lo = plan.levels[1].f_size;  // fresh region starts past F'_2
    std::int64_t checked = 0;
    for (std::int64_t g = lo; g + 1 < plan.levels[2].f_size - 8; ++g) {
      if ((g / 8) != ((g + 1) / 8)) continue;
      if (g < ((lo + 7) / 8) * 8) continue;
      CHECK(std::abs(seq.at_flat(g + 1) * std::conj(seq.at_flat(g)) - step) < 1e-12);
      ++checked;
    }
    CHECK(checked > 3000);
  }

  SUBCASE("identical provenance reproduces values bitwise") {
    const UnimodularSeq a = build_sequence_tiled(two_atom_half(), tilings, plan, seed);
    const UnimodularSeq b = build_sequence_tiled(two_atom_half(), tilings, plan, seed);
    REQUIRE(a.total() == b.total());
    for (std::int64_t i = 0; i < a.total(); ++i) CHECK(a.at_flat(i) == b.at_flat(i));
    const UnimodularSeq c =
        build_sequence_tiled(two_atom_half(), tilings, plan, SeedRecord{.seed = 102});
    bool any_diff = false;
    for (std::int64_t i = 0; i < a.total(); ++i) any_diff = any_diff || a.at_flat(i) != c.at_flat(i);
    CHECK(any_diff);
  }

  SUBCASE("unit modulus and level accounting") {
    const UnimodularSeq seq = build_sequence_tiled(two_atom_half(), tilings, plan, seed);
    for (std::int64_t i = 0; i < seq.total(); ++i)
      CHECK(std::abs(std::abs(seq.at_flat(i)) - 1.0) <= 1e-12);
    const auto& levels = seq.provenance().levels;
    REQUIRE(levels.size() == 3);
    for (std::size_t k = 2; k <= 3; ++k) {
      const auto& rec = levels[k - 1];
      // strict mode encoding of the coverage inequality
      CHECK(static_cast<double>(rec.covered_points) >
            (1.0 - 2.0 / static_cast<double>(k)) *
                static_cast<double>(plan.levels[k - 1].f_size));
      CHECK(rec.bad_tiles <= plan.levels[k - 2].f_size);
      CHECK(rec.fresh_centers > 0);
    }
  }

  SUBCASE("cyclic sums produce exact roots of unity") {
    const auto c4 = GroupDescriptor::cyclic_sum(4, 3);
    const auto schedule = default_k_schedule(c4, std::vector<std::int64_t>{1, 2});
    const TilingSequence ct = build_box_tiling_sequence(c4, schedule, 2);
    const FolnerSubPlan cp = plan_folner_subsequence(ct, PlanMode::practical, 2, 2.0);
    const SpectralMeasure nu = SpectralMeasure::make(
        c4, {{Character{c4, {}, {1, 0, 0}}, 0.5}}, {}, {}, 0.5);
    const UnimodularSeq seq = build_sequence_tiled(nu, ct, cp, seed);
    const CircleRange range = s_of_g(c4);
    for (std::int64_t i = 0; i < seq.total(); ++i)
      CHECK(distance_to_range(range, seq.at_flat(i)) <= 1e-12);
  }
}

TEST_CASE("block builder") {
  SUBCASE("alternating signs with phase resets") {
    const UnimodularSeq seq = build_sequence_blocks(point_mass_z(0.5),
                                                    std::vector<std::int64_t>{1, 2, 3},
                                                    SeedRecord{.seed = 5});
    REQUIRE(seq.total() == 6);
    const std::vector<double> expect = {1, 1, -1, 1, -1, 1};
    for (std::int64_t i = 0; i < 6; ++i) {
      CHECK(seq.at_flat(i).real() == doctest::Approx(expect[static_cast<std::size_t>(i)]));
      CHECK(std::abs(seq.at_flat(i).imag()) < 1e-12);
    }
    CHECK(seq.provenance().block_bounds == std::vector<std::int64_t>{0, 1, 3, 6});
  }

  SUBCASE("a single block is a pure character ramp") {
    const double theta = 0.1375;
    const UnimodularSeq seq = build_sequence_blocks(point_mass_z(theta),
                                                    std::vector<std::int64_t>{128},
                                                    SeedRecord{.seed = 6});
    for (std::int64_t n = 0; n < 128; ++n)
      CHECK(std::abs(seq.at_flat(n) - std::exp(cplx(0.0, kTwoPi * theta * n))) < 1e-12);
  }

  SUBCASE("mean recovers the atom mass at 0") {
    // nu = (1/2) delta_0 + (1/2) uniform: the Folner mean tends to nu({0})
    const SpectralMeasure nu =
        SpectralMeasure::make(Z, {{Character{Z, {0.0}, {}}, 0.5}}, {}, {}, 0.5);
    std::vector<std::int64_t> lengths;
    for (std::int64_t k = 0; k < 400; ++k) lengths.push_back(51 + k);
    const UnimodularSeq seq = build_sequence_blocks(nu, lengths, SeedRecord{.seed = 7});
    CHECK(seq.total() == 100200);
    cplx mean(0.0, 0.0);
    for (std::int64_t i = 0; i < seq.total(); ++i) mean += seq.at_flat(i);
    mean /= static_cast<double>(seq.total());
    CHECK(std::abs(mean - cplx(0.5, 0.0)) < 0.05);
  }

  SUBCASE("validation") {
    CHECK_THROWS_WITH_AS(build_sequence_blocks(point_mass_z(0.1),
                                               std::vector<std::int64_t>{4, 4},
                                               SeedRecord{}),
                         doctest::Contains("non-increasing"), invalid_argument);
    const auto c2 = GroupDescriptor::cyclic_sum(2, 1);
    const SpectralMeasure cyc = SpectralMeasure::make(
        c2, {{Character{c2, {}, {1}}, 1.0}}, {}, {}, 0.0);
    CHECK_THROWS_AS(
        build_sequence_blocks(cyc, std::vector<std::int64_t>{1, 2}, SeedRecord{}),
        invalid_argument);
  }
}

TEST_CASE("builders agree through correlation estimates") {
  // same measure, matched window scale; estimates at small lags agree within
  // twice the combined certificate radii
  const SpectralMeasure nu = two_atom_half();
  const SeedRecord seed{.seed = 314, .stream = 0};

  const auto schedule = default_k_schedule(Z, std::vector<std::int64_t>{1, 2, 32});
  const TilingSequence tilings = build_box_tiling_sequence(Z, schedule, 3);
  const FolnerSubPlan plan =
      plan_folner_subsequence(tilings, PlanMode::practical, 3, 16.0, 100000);
  const UnimodularSeq tiled = build_sequence_tiled(nu, tilings, plan, seed);

  std::vector<std::int64_t> lengths;
  for (std::int64_t k = 0; k < 40; ++k) lengths.push_back(2000 + 30 * k);
  const UnimodularSeq blocks = build_sequence_blocks(nu, lengths, seed);

  for (std::int64_t h = 0; h <= 8; ++h) {
    const std::int64_t n = 100000 - h;
    CorrelationEstimate a =
        folner_correlation(tiled, Coords{h}, FinitePart::interval(0, n));
    CorrelationEstimate b =
        folner_correlation(blocks, Coords{h}, FinitePart::interval(0, n));
    certify(a, 0.01, &tiled.provenance());
    certify(b, 0.01, &blocks.provenance());
    const double budget = 2.0 * (a.certificate.radius + b.certificate.radius);
    CHECK(std::abs(a.value - b.value) <= budget);
  }
}
