#pragma once

#include <span>
#include <vector>

#include "posdef.hpp"
#include "types.hpp"

namespace pdk {

/// Covariance of a stationary window: M[i][j] = phi(g_j - g_i), checked PSD
/// and stabilized with recorded jitter before factorization. Real-valued phi
/// is tagged and sampled as a real Gaussian process; otherwise paths are
/// circularly-symmetric complex Gaussian with zero pseudo-covariance, so
/// E[x_i conj(x_j)] = M[i][j] holds by construction.
struct CovarianceMatrix {
  GroupDescriptor desc;
  std::vector<Coords> window;
  HermitianMatrix mat;
  bool real_field = false;
  double jitter = 0.0;
  std::vector<cplx> chol;  // lower factor of mat + jitter I
  double min_pivot = 0.0;
};

/// Window size is capped at 256 for the dense route; larger stationary
/// windows go through sample_paths_spectral.
CovarianceMatrix build_covariance(const PosDefFn& phi, std::span<const Coords> window);

struct PathEnsemble {
  GroupDescriptor desc;
  std::vector<Coords> window;
  std::size_t paths = 0;
  bool real_field = false;
  SeedRecord seed;
  std::vector<cplx> data;  // paths x window, row-major

  /// -1 when the coordinates are not in the window. Box windows listed in
  /// row-major order resolve arithmetically; anything else binary-searches.
  std::int64_t index_of(std::span<const std::int64_t> coords) const;
  cplx at(std::size_t path, std::int64_t window_index) const {
    return data[path * window.size() + static_cast<std::size_t>(window_index)];
  }

  void build_index();

private:
  bool box_window_ = false;
  Coords box_lo_, box_hi_;
  std::vector<std::int64_t> sorted_order_;  // fallback lookup
};

PathEnsemble sample_paths(const CovarianceMatrix& cov, std::size_t m, const SeedRecord& seed);

/// Exact sampler for measures made of atoms plus an optional full-dual
/// uniform component: each path is sum_j sqrt(w_j) Z_j chi_j(g) plus an
/// i.i.d. term for the uniform mass. Valid on windows of any size.
PathEnsemble sample_paths_spectral(const SpectralMeasure& nu, std::span<const Coords> window,
                                   std::size_t m, const SeedRecord& seed);

struct MeanEstimate {
  cplx value;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Mean over paths of x_h conj(x_0) -- the ensemble correlation at lag h.
MeanEstimate ensemble_correlation(const PathEnsemble& ens, std::span<const std::int64_t> h);
/// Mean over paths of the coordinate at `at`.
MeanEstimate ensemble_mean(const PathEnsemble& ens, std::span<const std::int64_t> at);

/// Single-path Folner average (1/|F|) sum_{g in F} x_{g+h} conj(x_g).
cplx path_time_correlation(const PathEnsemble& ens, std::size_t path,
                           std::span<const std::int64_t> h, const FinitePart& f_set);
/// The same average for every path, sharing one index resolution.
std::vector<cplx> path_time_correlation_all(const PathEnsemble& ens,
                                            std::span<const std::int64_t> h,
                                            const FinitePart& f_set);

}  // namespace pdk
