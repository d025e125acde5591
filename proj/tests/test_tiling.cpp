#include <doctest.h>

#include "core/constructor.hpp"
#include "core/tiling.hpp"

using namespace pdk;

namespace {
const GroupDescriptor Z = GroupDescriptor::lattice(1);
const GroupDescriptor Z2 = GroupDescriptor::lattice(2);
}  // namespace

TEST_CASE("tile lookup") {
  const TilingSequence seq = box_tilings_with_sides(Z, std::vector<std::int64_t>{2});
  const TileRef ref = tile_of(seq, 1, Coords{5});
  CHECK(ref.center == Coords{4});

  const TilingSequence seq2 = box_tilings_with_sides(Z2, std::vector<std::int64_t>{3});
  // floor-division oracle: (4,-1) -> (3*floor(4/3), 3*floor(-1/3)) = (3,-3)
  const TileRef ref2 = tile_of(seq2, 1, Coords{4, -1});
  CHECK(ref2.center == Coords{3, -3});

  const TileRef ref3 = tile_of(seq2, 1, Coords{-6, 9});
  CHECK(ref3.center == Coords{-6, 9});
}

TEST_CASE("well containment") {
  const TilingSequence seq = box_tilings_with_sides(Z, std::vector<std::int64_t>{4});
  CHECK(well_contained(seq, 1, Coords{3}, FinitePart::interval(0, 8)));
  CHECK_FALSE(well_contained(seq, 1, Coords{6}, FinitePart::interval(0, 7)));
  CHECK(well_contained(seq, 1, Coords{6}, FinitePart::interval(-100, 100)));
}

TEST_CASE("well containment density on boxes") {
  const TilingSequence seq = box_tilings_with_sides(Z, std::vector<std::int64_t>{8});
  SUBCASE("aligned window is fully well contained") {
    const FinitePart f = FinitePart::interval(0, 64);
    for (std::int64_t t = 0; t < 64; ++t) CHECK(well_contained(seq, 1, Coords{t}, f));
  }
  SUBCASE("general window misses at most L/N of the points") {
    const std::int64_t n = 100;  // not a multiple of 8
    const FinitePart f = FinitePart::interval(0, n);
    std::int64_t good = 0;
    for (std::int64_t t = 0; t < n; ++t) good += well_contained(seq, 1, Coords{t}, f) ? 1 : 0;
    CHECK(static_cast<double>(good) / n >= 1.0 - 8.0 / n);
  }
}

TEST_CASE("congruence verification") {
  SUBCASE("dyadic intervals pass") {
    const TilingSequence seq =
        box_tilings_with_sides(Z, std::vector<std::int64_t>{2, 4, 8, 16});
    const CongruenceReport rep =
        verify_congruence(seq, FinitePart::interval(-1000, 1001));
    CHECK(rep.passed);
    CHECK(rep.partition_ok);
    CHECK(rep.congruence_ok);
  }

  SUBCASE("corrupted offset fails with a witness") {
    const TilingSequence seq = box_tilings_with_sides(Z, std::vector<std::int64_t>{2, 4});
    const TilingSequence bad = seq.with_corrupted_offset(2, Coords{1});
    const CongruenceReport rep = verify_congruence(bad, FinitePart::interval(-50, 51));
    CHECK_FALSE(rep.passed);
    REQUIRE(rep.witness.has_value());
  }

  SUBCASE("Z^2 with sides 2 and 6 passes") {
    const TilingSequence seq = box_tilings_with_sides(Z2, std::vector<std::int64_t>{2, 6});
    const CongruenceReport rep =
        verify_congruence(seq, FinitePart::box(Z2, {-60, -60}, {61, 61}));
    CHECK(rep.passed);
  }
}

TEST_CASE("box tiling construction from K schedules") {
  SUBCASE("Z with K_k = [-k, k]") {
    const auto schedule = default_k_schedule(Z, std::vector<std::int64_t>{1, 2, 3});
    const TilingSequence seq = build_box_tiling_sequence(Z, schedule, 3);
    std::int64_t prev = 1;
    for (std::size_t k = 1; k <= 3; ++k) {
      const Tiling& lvl = seq.level(k);
      REQUIRE(lvl.shapes.size() == 1);
      const std::int64_t side = lvl.centers[0].periods[0];
      CHECK(side % prev == 0);
      // realized defect beats 1/k; brute-force check against the groups op
      const Ratio defect = invariance_defect(schedule[k - 1], lvl.shapes[0]);
      CHECK(defect.value() < 1.0 / static_cast<double>(k));
      CHECK(defect.num == lvl.shape_defects[0].num);
      CHECK(defect.value() <=
            2.0 * static_cast<double>(k) / static_cast<double>(side) + 1e-12);
      prev = side;
    }
  }

  SUBCASE("Z^2 cross-shaped K at depth 1") {
    const FinitePart cross(Z2, {{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
    const TilingSequence seq = build_box_tiling_sequence(Z2, std::vector<FinitePart>{cross}, 1);
    const Ratio defect = invariance_defect(cross, seq.level(1).shapes[0]);
    CHECK(defect.value() < 1.0);
  }

  SUBCASE("identity K admits side 1") {
    const FinitePart id_only = FinitePart::singleton(Z, {0});
    const TilingSequence seq = build_box_tiling_sequence(Z, std::vector<FinitePart>{id_only}, 1);
    CHECK(seq.level(1).centers[0].periods[0] == 1);
  }
}

TEST_CASE("cyclic tilings") {
  const auto c4 = GroupDescriptor::cyclic_sum(4, 3);

  SUBCASE("trivial and whole-group tilings verify") {
    std::vector<Tiling> levels = {trivial_tiling(c4), whole_group_tiling(c4)};
    const TilingSequence seq(c4, std::move(levels));
    const CongruenceReport rep = verify_congruence(seq, FinitePart::full_group(c4));
    CHECK(rep.passed);
  }

  SUBCASE("subgroup boxes from the K schedule") {
    const auto schedule = default_k_schedule(c4, std::vector<std::int64_t>{1, 2});
    const TilingSequence seq = build_box_tiling_sequence(c4, schedule, 2);
    const CongruenceReport rep = verify_congruence(seq, FinitePart::full_group(c4));
    CHECK(rep.passed);
    CHECK(seq.level(1).shape_defects[0].num == 0);
    CHECK(seq.level(2).shapes[0].size() == 16);
  }
}

TEST_CASE("tiling validation") {
  CHECK_THROWS_AS(box_tilings_with_sides(Z, std::vector<std::int64_t>{2, 3}),
                  invalid_argument);
  CHECK_THROWS_AS(box_tilings_with_sides(Z, std::vector<std::int64_t>{0}), invalid_argument);
  // shapes must contain the identity
  Tiling lvl;
  lvl.shapes.push_back(FinitePart::interval(1, 3));
  lvl.centers.push_back(CenterLattice{Coords{2}, Coords{0}});
  lvl.k_set = FinitePart::singleton(Z, {0});
  CHECK_THROWS_AS(TilingSequence(Z, {lvl}), invalid_argument);
}
