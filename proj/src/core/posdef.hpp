#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spectral.hpp"
#include "types.hpp"

namespace pdk {

/// Dense Hermitian matrix, row-major complex storage.
class HermitianMatrix {
public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(std::size_t n) : n_(n), a_(n * n, cplx(0.0, 0.0)) {}

  std::size_t size() const { return n_; }
  cplx& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const cplx& at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  std::span<const cplx> data() const { return a_; }

  double trace_real() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += a_[i * n_ + i].real();
    return t;
  }
  double max_abs_imag() const;

private:
  std::size_t n_ = 0;
  std::vector<cplx> a_;
};

/// A positive definite function on a supported group, given as one of:
/// the transform of a spectral measure, an amplitude-scaled character, a
/// conjugate-symmetric table, or a positive combination of such functions.
class PosDefFn {
public:
  static PosDefFn from_measure(SpectralMeasure nu);
  static PosDefFn character_fn(Character chi, double amplitude);
  static PosDefFn tabulated(const GroupDescriptor& desc,
                            std::vector<std::pair<Coords, cplx>> entries);
  static PosDefFn sum_of(std::vector<std::pair<PosDefFn, double>> parts);

  /// Catalog: eigenvalue_sqrt2, fejer1, delta, two_atom_half (all over Z).
  static PosDefFn example(std::string_view name);

  cplx eval(std::span<const std::int64_t> g) const;
  cplx eval(const GroupElement& g) const;
  cplx operator()(std::span<const std::int64_t> g) const { return eval(g); }

  const GroupDescriptor& descriptor() const;
  /// Non-null when the function is the transform of a stored measure.
  const SpectralMeasure* measure() const;
  std::string describe() const;

private:
  struct Impl;
  explicit PosDefFn(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// M[i][j] = phi(g_j - g_i); Hermitian exactly by construction (the upper
/// triangle is computed, the lower mirrored).
HermitianMatrix gram_matrix(const PosDefFn& phi, std::span<const Coords> pts);

struct CholeskyVerdict {
  bool passed = false;
  /// Smallest accepted pivot, or the violating (negative) value on failure.
  double min_pivot = 0.0;
};

/// Diagonal-pivoted Cholesky PSD check with absolute pivot tolerance.
/// Destroys its working copy; the matrix argument is taken by value.
CholeskyVerdict pivoted_cholesky_check(HermitianMatrix a, double tol);

struct PdVerdict {
  bool passed = false;
  std::size_t worst_window = 0;
  double min_value = 0.0;
};

/// Necessary-condition checker on finite windows (each of size <= 64): the
/// Gram matrix of every window must admit a pivoted Cholesky factorization
/// with pivots >= -tol_scale * trace. A pass certifies consistency with
/// positive definiteness on the tested windows only.
PdVerdict check_positive_definite(const PosDefFn& phi,
                                  std::span<const std::vector<Coords>> windows,
                                  double tol_scale = 1e-9);

}  // namespace pdk
