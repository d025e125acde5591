#include <doctest.h>

#include <cmath>
#include <complex>
#include <set>

#include "core/group.hpp"
#include "core/rng.hpp"

using namespace pdk;

namespace {

// Brute-force Minkowski sum for oracle checks: all pairwise sums into a set.
std::set<Coords> oracle_sum(const GroupDescriptor& desc, const FinitePart& a,
                            const FinitePart& b) {
  std::set<Coords> out;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      GroupElement ga{desc, Coords(a.at(i).begin(), a.at(i).end())};
      GroupElement gb{desc, Coords(b.at(j).begin(), b.at(j).end())};
      out.insert(add(ga, gb).coords);
    }
  return out;
}

}  // namespace

TEST_CASE("descriptor parsing") {
  CHECK(GroupDescriptor::parse("Z") == GroupDescriptor::lattice(1));
  CHECK(GroupDescriptor::parse("Z^2") == GroupDescriptor::lattice(2));
  CHECK(GroupDescriptor::parse("C(4)^10") == GroupDescriptor::cyclic_sum(4, 10));
  CHECK(GroupDescriptor::parse("C(2)") == GroupDescriptor::cyclic_sum(2, 1));
  CHECK(GroupDescriptor::parse("Z^3").to_string() == "Z^3");
  CHECK_THROWS_AS(GroupDescriptor::parse("Q"), invalid_argument);
  CHECK_THROWS_AS(GroupDescriptor::parse("Z^0"), invalid_argument);
  CHECK_THROWS_AS(GroupDescriptor::parse("C(1)"), invalid_argument);
}

TEST_CASE("group law") {
  const auto z = GroupDescriptor::lattice(1);
  CHECK(add({z, {3}}, {z, {4}}).coords == Coords{7});

  const auto c5 = GroupDescriptor::cyclic_sum(5, 1);
  CHECK(add({c5, {3}}, {c5, {4}}).coords == Coords{2});

  const auto z2 = GroupDescriptor::lattice(2);
  CHECK(neg({z2, {1, -2}}).coords == Coords{-1, 2});

  // add(g, neg(g)) = identity
  const GroupElement g{c5, {3}};
  CHECK(add(g, neg(g)).coords == identity(c5).coords);

  CHECK_THROWS_AS(add({z, {1}}, {z2, {1, 1}}), invalid_argument);
}

TEST_CASE("character evaluation") {
  const auto z = GroupDescriptor::lattice(1);
  const Character trivial{z, {0.0}, {}};
  CHECK(std::abs(char_eval(trivial, GroupElement{z, {17}}) - cplx(1.0, 0.0)) < 1e-14);

  const Character half{z, {0.5}, {}};
  CHECK(std::abs(char_eval(half, GroupElement{z, {3}}) - cplx(-1.0, 0.0)) < 1e-13);

  // oracle: direct exponential of 2*pi*<g, theta> = pi gives -1
  const auto z2 = GroupDescriptor::lattice(2);
  const Character quarter{z2, {0.25, 0.25}, {}};
  const cplx expected = std::exp(cplx(0.0, kTwoPi * 0.5));
  CHECK(std::abs(char_eval(quarter, GroupElement{z2, {1, 1}}) - expected) < 1e-13);
  CHECK(std::abs(expected - cplx(-1.0, 0.0)) < 1e-14);

  // cyclic: residues give exact roots of unity
  const auto c4 = GroupDescriptor::cyclic_sum(4, 2);
  const Character chi{c4, {}, {1, 2}};
  const cplx v = char_eval(chi, GroupElement{c4, {1, 1}});  // (1*1 + 1*2)/4 of a turn
  CHECK(std::abs(v - cplx(0.0, -1.0)) < 1e-13);

  CHECK_THROWS_AS(char_eval(half, GroupElement{z2, {1, 1}}), invalid_argument);
}

TEST_CASE("character homomorphism property") {
  Rng rng(20240811, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const std::int64_t d = 1 + static_cast<std::int64_t>(rng.next_u64() % 3);
    const auto desc = GroupDescriptor::lattice(d);
    Character chi{desc, std::vector<double>(d), {}};
    for (auto& t : chi.theta) t = rng.uniform01();
    GroupElement g{desc, Coords(d)}, h{desc, Coords(d)};
    for (auto& v : g.coords) v = static_cast<std::int64_t>(rng.next_u64() % 65) - 32;
    for (auto& v : h.coords) v = static_cast<std::int64_t>(rng.next_u64() % 65) - 32;
    const cplx lhs = char_eval(chi, add(g, h));
    const cplx rhs = char_eval(chi, g) * char_eval(chi, h);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
    CHECK(std::abs(std::abs(lhs) - 1.0) <= 1e-12);
  }
}

TEST_CASE("invariance defect") {
  const auto z = GroupDescriptor::lattice(1);

  const FinitePart id_set = FinitePart::singleton(z, {0});
  const FinitePart f100 = FinitePart::interval(0, 100);
  CHECK(invariance_defect(id_set, f100).num == 0);

  const FinitePart k01(z, {{0}, {1}});
  const Ratio r1 = invariance_defect(k01, f100);
  CHECK(r1.num == 1);
  CHECK(r1.den == 100);

  const FinitePart k101(z, {{-1}, {0}, {1}});
  const Ratio r2 = invariance_defect(k101, FinitePart::interval(0, 10));
  CHECK(r2.num == 2);
  CHECK(r2.den == 10);

  CHECK_THROWS_AS(invariance_defect(k01, FinitePart{}), invalid_argument);
}

TEST_CASE("invariance defect formula on intervals") {
  const auto z = GroupDescriptor::lattice(1);
  // defect({g}, [0,n)) = 2 min(|g|, n) / n, sampled over the tested grid
  for (std::int64_t g : {1, 2, 5, 17, 32}) {
    for (std::int64_t n : {4, 57, 1000, 10000}) {
      const FinitePart k = FinitePart::singleton(z, {g});
      const Ratio r = invariance_defect(k, FinitePart::interval(0, n));
      CHECK(r.num == 2 * std::min(g, n));
      CHECK(r.den == n);
      CHECK(r.value() <= 2.0 * static_cast<double>(g) / static_cast<double>(n));
    }
  }
}

TEST_CASE("minkowski sum matches the pairwise oracle") {
  Rng rng(7, 0);
  for (int rep = 0; rep < 40; ++rep) {
    const std::int64_t d = 1 + static_cast<std::int64_t>(rng.next_u64() % 2);
    const auto desc = d == 1 ? GroupDescriptor::lattice(1) : GroupDescriptor::cyclic_sum(6, 2);
    auto random_set = [&](std::size_t count) {
      std::vector<Coords> elems;
      for (std::size_t i = 0; i < count; ++i) {
        Coords c(desc.rank());
        for (auto& v : c) v = static_cast<std::int64_t>(rng.next_u64() % 21) - 10;
        elems.push_back(std::move(c));
      }
      return FinitePart(desc, std::move(elems));
    };
    const FinitePart a = random_set(1 + rng.next_u64() % 6);
    const FinitePart b = random_set(1 + rng.next_u64() % 12);
    const FinitePart sum = minkowski_sum(a, b);
    const auto oracle = oracle_sum(desc, a, b);
    REQUIRE(sum.size() == oracle.size());
    for (std::size_t i = 0; i < sum.size(); ++i)
      CHECK(oracle.count(Coords(sum.at(i).begin(), sum.at(i).end())) == 1);
  }
}

TEST_CASE("tempered constant") {
  const auto z = GroupDescriptor::lattice(1);

  SUBCASE("unit-step boxes at n=2, against the pairwise oracle") {
    const FolnerPlan plan = FolnerPlan::boxes(z, std::vector<std::int64_t>{1, 2});
    const Ratio r = tempered_constant(plan, 2);
    // oracle: -F_1 + F_2 = {0} + {0,1} = {0,1}
    const auto oracle = oracle_sum(z, negate(plan.level(1)), plan.level(2));
    CHECK(std::cmp_equal(r.num, oracle.size()));
    CHECK(r.den == 2);
  }

  SUBCASE("small plans agree with the pairwise-union oracle") {
    std::vector<std::int64_t> sides;
    for (std::int64_t k = 1; k <= 9; ++k) sides.push_back(k * k);
    const FolnerPlan plan = FolnerPlan::boxes(z, sides);
    for (std::size_t n = 2; n <= plan.depth(); ++n) {
      std::set<Coords> un;
      for (std::size_t k = 1; k < n; ++k) {
        const auto s = oracle_sum(z, negate(plan.level(k)), plan.level(n));
        un.insert(s.begin(), s.end());
      }
      const Ratio r = tempered_constant(plan, n);
      CHECK(std::cmp_equal(r.num, un.size()));
      CHECK(std::cmp_equal(r.den, plan.level(n).size()));
    }
  }

  SUBCASE("dyadic boxes stay below C = 2") {
    std::vector<std::int64_t> sides;
    for (std::int64_t k = 1; k <= 20; ++k) sides.push_back(std::int64_t{1} << k);
    const FolnerPlan plan = FolnerPlan::boxes(z, sides);
    for (std::size_t n = 2; n <= 20; ++n) CHECK(tempered_constant(plan, n).value() <= 2.0);
  }

  SUBCASE("n=1 is out of range") {
    const FolnerPlan plan = FolnerPlan::boxes(z, std::vector<std::int64_t>{1, 2});
    CHECK_THROWS_AS(tempered_constant(plan, 1), invalid_argument);
  }
}

TEST_CASE("folner plan invariants") {
  const auto z = GroupDescriptor::lattice(1);
  CHECK_THROWS_AS(FolnerPlan::boxes(z, std::vector<std::int64_t>{4, 4}), invalid_argument);
  CHECK_THROWS_AS(FolnerPlan::boxes(z, std::vector<std::int64_t>{4, 2}), invalid_argument);
  const FolnerPlan plan = FolnerPlan::full_group(GroupDescriptor::cyclic_sum(3, 2));
  CHECK(plan.level(1).size() == 9);
}

TEST_CASE("S(G)") {
  CHECK(s_of_g(GroupDescriptor::lattice(3)).full_circle);
  const CircleRange c4 = s_of_g(GroupDescriptor::cyclic_sum(4, 10));
  REQUIRE(c4.root_order.has_value());
  CHECK(*c4.root_order == 4);
  const CircleRange c2 = s_of_g(GroupDescriptor::cyclic_sum(2, 1));
  CHECK(*c2.root_order == 2);

  // every character image lies in the reported range
  const auto desc = GroupDescriptor::cyclic_sum(4, 3);
  Rng rng(3, 1);
  for (int rep = 0; rep < 50; ++rep) {
    Character chi{desc, {}, Coords(desc.rank())};
    for (auto& r : chi.residues) r = static_cast<std::int64_t>(rng.next_u64() % 4);
    GroupElement g{desc, Coords(desc.rank())};
    for (auto& v : g.coords) v = static_cast<std::int64_t>(rng.next_u64() % 4);
    CHECK(distance_to_range(c4, char_eval(chi, g)) <= 1e-12);
  }
}
