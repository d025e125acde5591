#pragma once

#include <span>
#include <vector>

#include "gmsc.hpp"
#include "group.hpp"
#include "posdef.hpp"
#include "types.hpp"

namespace pdk {

/// Rotation on a finite-dimensional torus realizing a purely atomic spectral
/// measure: coordinate j rotates by the phase of character theta_j, and the
/// observable is f(x) = sum_j sqrt(a_j) e^{2 pi i x_j}. Correlations of f
/// equal the transform of sum_j a_j delta_{theta_j} exactly.
struct RotationSystem {
  GroupDescriptor desc;
  std::vector<double> weights;      // a_j > 0
  std::vector<Character> atoms;     // pairwise distinct
};

RotationSystem make_rotation_system(const GroupDescriptor& desc,
                                    std::vector<std::pair<double, Character>> atoms);
/// Builds the system from a purely atomic measure.
RotationSystem rotation_from_measure(const SpectralMeasure& nu);

/// sum_j a_j chi_j(h): the exact correlation at lag h.
cplx rotation_correlation(const RotationSystem& sys, std::span<const std::int64_t> h);

/// Birkhoff average of f(x0 + (g+h) theta) conj(f(x0 + g theta)) over the box
/// g in [0, n)^d. Converges to rotation_correlation; exact for single atoms.
cplx rotation_orbit_average(const RotationSystem& sys, std::span<const double> x0,
                            std::int64_t n, std::span<const std::int64_t> h);

struct SumRepRow {
  Coords lag;
  cplx combined;      // ensemble correlation of the weak part + exact compact part
  cplx target;        // phi_w(h) + phi_c(h)
  double budget;      // allowed deviation (standard-error based)
  double cross_mag;   // |mean(x_h)| * |orbit mean of conj(f_c)|
  double cross_budget;
  bool pass = false;
};

struct SumRepReport {
  bool preconditions_ok = false;  // weak-part mean consistent with zero
  cplx weak_mean;
  double weak_mean_se = 0.0;
  std::vector<SumRepRow> rows;
  bool passed = false;
};

/// Checks numerically that the correlation of a sum observable over a product
/// system splits into the weak (Gaussian) and compact (rotation) parts: the
/// cross terms are products of means, and the weak part has mean zero.
SumRepReport sum_representation_check(const PathEnsemble& weak, const PosDefFn& phi_w,
                                      const RotationSystem& compact,
                                      std::span<const Coords> lags, std::int64_t orbit_n);

}  // namespace pdk
