#include <doctest.h>

#include <cmath>

#include "core/rotation.hpp"
#include "core/rng.hpp"

using namespace pdk;

namespace {

const GroupDescriptor Z = GroupDescriptor::lattice(1);

RotationSystem single_sqrt2() {
  return make_rotation_system(Z, {{1.0, Character{Z, {std::sqrt(2.0) - 1.0}, {}}}});
}

}  // namespace

TEST_CASE("exact rotation correlations") {
  SUBCASE("single atom reproduces the eigenvalue example") {
    const cplx v = rotation_correlation(single_sqrt2(), Coords{1});
    CHECK(std::abs(v - std::exp(cplx(0.0, kTwoPi * std::sqrt(2.0)))) < 1e-12);
  }

  SUBCASE("two half atoms give the parity function") {
    const RotationSystem sys = make_rotation_system(
        Z, {{0.5, Character{Z, {0.0}, {}}}, {0.5, Character{Z, {0.5}, {}}}});
    for (std::int64_t h = -5; h <= 5; ++h) {
      const double target = (1.0 + (h % 2 == 0 ? 1.0 : -1.0)) / 2.0;
      CHECK(std::abs(rotation_correlation(sys, Coords{h}) - cplx(target, 0.0)) < 1e-13);
    }
  }

  SUBCASE("lag 0 returns the total weight") {
    const RotationSystem sys = make_rotation_system(
        Z, {{0.3, Character{Z, {0.1}, {}}}, {0.7, Character{Z, {0.8}, {}}}});
    CHECK(rotation_correlation(sys, Coords{0}).real() == doctest::Approx(1.0));
  }

  SUBCASE("matches the transform of the atomic measure") {
    Rng rng(55, 0);
    for (int rep = 0; rep < 100; ++rep) {
      const std::size_t n_atoms = 1 + rng.next_u64() % 4;
      std::vector<std::pair<double, Character>> atoms;
      std::vector<SpectralMeasure::Atom> measure_atoms;
      double left = 1.0;
      for (std::size_t j = 0; j < n_atoms; ++j) {
        const double w = j + 1 == n_atoms ? left : left * (0.2 + 0.6 * rng.uniform01());
        left -= j + 1 == n_atoms ? 0.0 : w;
        const Character chi{Z, {rng.uniform01()}, {}};
        atoms.emplace_back(w, chi);
        measure_atoms.push_back({chi, w});
      }
      RotationSystem sys;
      try {
        sys = make_rotation_system(Z, atoms);
      } catch (const invalid_argument&) {
        continue;  // rare duplicate random atoms
      }
      const SpectralMeasure nu = SpectralMeasure::make(Z, measure_atoms, {}, {}, 0.0);
      const std::int64_t h = static_cast<std::int64_t>(rng.next_u64() % 41) - 20;
      CHECK(std::abs(rotation_correlation(sys, Coords{h}) - nu.fourier(GroupElement{Z, {h}})) <=
            1e-12);
    }
  }
}

TEST_CASE("orbit averages") {
  SUBCASE("single atoms are exact for any start point and length") {
    Rng rng(56, 0);
    for (int rep = 0; rep < 5; ++rep) {
      const std::vector<double> x0 = {rng.uniform01()};
      const cplx avg = rotation_orbit_average(single_sqrt2(), x0, 1000, Coords{1});
      CHECK(std::abs(avg - rotation_correlation(single_sqrt2(), Coords{1})) < 1e-12);
    }
  }

  SUBCASE("two incommensurate atoms converge at h=0") {
    const RotationSystem sys = make_rotation_system(
        Z, {{0.5, Character{Z, {std::sqrt(2.0) - 1.0}, {}}},
            {0.5, Character{Z, {std::sqrt(3.0) - 1.0}, {}}}});
    const cplx avg = rotation_orbit_average(sys, std::vector<double>{0.0, 0.0}, 100000,
                                            Coords{0});
    CHECK(std::abs(avg - cplx(1.0, 0.0)) < 0.05);
  }

  SUBCASE("N = 1 returns |f(x0)|^2 at lag 0") {
    const RotationSystem sys = make_rotation_system(
        Z, {{0.5, Character{Z, {0.3}, {}}}, {0.5, Character{Z, {0.7}, {}}}});
    const std::vector<double> x0 = {0.2, 0.9};
    const cplx avg = rotation_orbit_average(sys, x0, 1, Coords{0});
    const cplx f = std::sqrt(0.5) * std::exp(cplx(0.0, kTwoPi * 0.2)) +
                   std::sqrt(0.5) * std::exp(cplx(0.0, kTwoPi * 0.9));
    CHECK(std::abs(avg - cplx(std::norm(f), 0.0)) < 1e-12);
  }

  SUBCASE("longer orbits do not degrade accuracy (median over starts)") {
    const RotationSystem systems[] = {
        single_sqrt2(),
        make_rotation_system(Z, {{0.5, Character{Z, {std::sqrt(2.0) - 1.0}, {}}},
                                 {0.5, Character{Z, {std::sqrt(3.0) - 1.0}, {}}}}),
    };
    Rng rng(57, 0);
    for (const auto& sys : systems) {
      std::vector<double> err_short, err_long;
      for (int s = 0; s < 20; ++s) {
        std::vector<double> x0(sys.atoms.size());
        for (auto& v : x0) v = rng.uniform01();
        const cplx exact = rotation_correlation(sys, Coords{1});
        err_short.push_back(
            std::abs(rotation_orbit_average(sys, x0, 1000, Coords{1}) - exact));
        err_long.push_back(
            std::abs(rotation_orbit_average(sys, x0, 100000, Coords{1}) - exact));
      }
      std::sort(err_short.begin(), err_short.end());
      std::sort(err_long.begin(), err_long.end());
      CHECK(err_long[10] <= err_short[10] + 1e-11);
    }
  }
}

TEST_CASE("sum representation check") {
  SUBCASE("delta plus single atom passes") {
    const PosDefFn phi_w = PosDefFn::example("delta");
    std::vector<Coords> window;
    for (std::int64_t i = 0; i < 10; ++i) window.push_back({i});
    const PathEnsemble weak =
        sample_paths(build_covariance(phi_w, window), 20000, SeedRecord{.seed = 61});
    const RotationSystem compact = single_sqrt2();
    std::vector<Coords> lags;
    for (std::int64_t h = 0; h <= 8; ++h) lags.push_back({h});
    const SumRepReport rep = sum_representation_check(weak, phi_w, compact, lags, 100000);
    CHECK(rep.preconditions_ok);
    CHECK(rep.passed);
    for (const auto& row : rep.rows) {
      CHECK(row.pass);
      CHECK(row.cross_mag <= row.cross_budget);
    }
  }

  SUBCASE("two-atom weak part with a constant compact part") {
    const PosDefFn phi_w = PosDefFn::example("two_atom_half");
    std::vector<Coords> window;
    for (std::int64_t i = 0; i < 6; ++i) window.push_back({i});
    const PathEnsemble weak =
        sample_paths(build_covariance(phi_w, window), 20000, SeedRecord{.seed = 62});
    const RotationSystem compact =
        make_rotation_system(Z, {{1.0, Character{Z, {0.0}, {}}}});
    std::vector<Coords> lags = {{0}, {1}, {2}, {3}};
    const SumRepReport rep = sum_representation_check(weak, phi_w, compact, lags, 1000);
    CHECK(rep.preconditions_ok);
    CHECK(rep.passed);
    // constant-plus-oscillation target: phi_w(h) + 1
    for (const auto& row : rep.rows) {
      const double expect = (1.0 + (row.lag[0] % 2 == 0 ? 1.0 : -1.0)) / 2.0 + 1.0;
      CHECK(std::abs(row.target - cplx(expect, 0.0)) < 1e-12);
    }
  }

  SUBCASE("rotation systems validate their atoms") {
    CHECK_THROWS_AS(make_rotation_system(Z, {}), invalid_argument);
    CHECK_THROWS_AS(
        make_rotation_system(Z, {{0.5, Character{Z, {0.25}, {}}},
                                 {0.5, Character{Z, {0.25}, {}}}}),
        invalid_argument);
    CHECK_THROWS_AS(make_rotation_system(Z, {{-1.0, Character{Z, {0.25}, {}}}}),
                    invalid_argument);
  }
}
