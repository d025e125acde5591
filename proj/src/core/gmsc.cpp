#include "gmsc.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "rng.hpp"

namespace pdk {

namespace {

constexpr std::size_t kDenseWindowCap = 256;

// Plain (non-pivoted) Cholesky of an SPD matrix; jitter must already be in.
std::vector<cplx> cholesky_lower(const HermitianMatrix& m) {
  const std::size_t n = m.size();
  std::vector<cplx> l(n * n, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      cplx sum = m.at(i, j);
      for (std::size_t k = 0; k < j; ++k) sum -= l[i * n + k] * std::conj(l[j * n + k]);
      if (i == j) {
        const double d = sum.real();
        if (d <= 0.0) throw numeric_error("covariance factorization lost positivity");
        l[i * n + i] = cplx(std::sqrt(d), 0.0);
      } else {
        l[i * n + j] = sum / l[j * n + j].real();
      }
    }
  }
  return l;
}

}  // namespace

void PathEnsemble::build_index() {
  const std::size_t r = static_cast<std::size_t>(desc.rank());
  box_window_ = false;
  if (!window.empty()) {
    box_lo_ = window.front();
    box_hi_ = window.front();
    for (const auto& w : window)
      for (std::size_t i = 0; i < r; ++i) {
        box_lo_[i] = std::min(box_lo_[i], w[i]);
        box_hi_[i] = std::max(box_hi_[i], w[i]);
      }
    std::int64_t volume = 1;
    for (std::size_t i = 0; i < r; ++i) volume *= box_hi_[i] - box_lo_[i] + 1;
    if (std::cmp_equal(volume, window.size())) {
      // verify row-major enumeration so index arithmetic is valid
      box_window_ = true;
      std::int64_t expect = 0;
      for (const auto& w : window) {
        std::int64_t idx = 0;
        for (std::size_t i = 0; i < r; ++i)
          idx = idx * (box_hi_[i] - box_lo_[i] + 1) + (w[i] - box_lo_[i]);
        if (idx != expect++) {
          box_window_ = false;
          break;
        }
      }
    }
  }
  if (!box_window_) {
    sorted_order_.resize(window.size());
    for (std::size_t i = 0; i < window.size(); ++i) sorted_order_[i] = static_cast<std::int64_t>(i);
    std::sort(sorted_order_.begin(), sorted_order_.end(),
              [&](std::int64_t a, std::int64_t b) { return window[a] < window[b]; });
  }
}

std::int64_t PathEnsemble::index_of(std::span<const std::int64_t> coords) const {
  const Coords key = canonicalize(desc, coords);
  if (box_window_) {
    std::int64_t idx = 0;
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (key[i] < box_lo_[i] || key[i] > box_hi_[i]) return -1;
      idx = idx * (box_hi_[i] - box_lo_[i] + 1) + (key[i] - box_lo_[i]);
    }
    return idx;
  }
  auto it = std::lower_bound(sorted_order_.begin(), sorted_order_.end(), key,
                             [&](std::int64_t a, const Coords& k) { return window[a] < k; });
  if (it == sorted_order_.end() || !(window[*it] == key)) return -1;
  return *it;
}

CovarianceMatrix build_covariance(const PosDefFn& phi, std::span<const Coords> window) {
  if (window.empty()) throw invalid_argument("build_covariance: empty window");
  if (window.size() > kDenseWindowCap)
    throw invalid_argument("build_covariance: window exceeds the dense cap of 256");

  CovarianceMatrix out;
  out.desc = phi.descriptor();
  out.window.reserve(window.size());
  for (const auto& w : window) out.window.push_back(canonicalize(out.desc, w));
  out.mat = gram_matrix(phi, window);

  const double trace = out.mat.trace_real();
  const double tol = 1e-9 * std::max(trace, 1e-300);
  const CholeskyVerdict verdict = pivoted_cholesky_check(out.mat, tol);
  out.min_pivot = verdict.min_pivot;
  if (!verdict.passed)
    throw numeric_error("phi is not positive definite on this window (pivot " +
                        std::to_string(verdict.min_pivot) + ")");

  out.real_field = out.mat.max_abs_imag() <= 1e-12;

  // The sampler must satisfy E[x_g conj(x_0)] = phi(g), i.e.
  // E[x_i conj(x_j)] = phi(g_i - g_j) = conj(M[i][j]); factor the conjugated
  // matrix so the Gram convention M[i][j] = phi(g_j - g_i) stays intact.
  HermitianMatrix to_factor(out.mat.size());
  for (std::size_t i = 0; i < out.mat.size(); ++i)
    for (std::size_t j = 0; j < out.mat.size(); ++j)
      to_factor.at(i, j) = std::conj(out.mat.at(i, j));

  // Rank-deficient covariances (pure characters are the central demo case)
  // are stabilized with recorded jitter; well-conditioned ones factor as-is.
  try {
    out.jitter = 0.0;
    out.chol = cholesky_lower(to_factor);
  } catch (const numeric_error&) {
    const double phi0 = out.mat.at(0, 0).real();
    out.jitter = 1e-10 * std::max(phi0, 1e-30);
    for (std::size_t i = 0; i < to_factor.size(); ++i)
      to_factor.at(i, i) += cplx(out.jitter, 0.0);
    out.chol = cholesky_lower(to_factor);
  }
  return out;
}

PathEnsemble sample_paths(const CovarianceMatrix& cov, std::size_t m, const SeedRecord& seed) {
  if (m < 1) throw invalid_argument("sample_paths: need at least one path");
  const std::size_t n = cov.window.size();
  PathEnsemble out;
  out.desc = cov.desc;
  out.window = cov.window;
  out.paths = m;
  out.real_field = cov.real_field;
  out.seed = seed;
  out.data.assign(m * n, cplx(0.0, 0.0));
  out.build_index();

  std::vector<cplx> z(n);
  const double half = std::sqrt(0.5);
  for (std::size_t p = 0; p < m; ++p) {
    // per-path keyed stream: results do not depend on batching
    Rng rng = Rng::keyed(seed, std::array<std::int64_t, 1>{static_cast<std::int64_t>(p)});
    if (cov.real_field) {
      for (auto& v : z) v = cplx(rng.normal(), 0.0);
    } else {
      for (auto& v : z) v = cplx(half * rng.normal(), half * rng.normal());
    }
    for (std::size_t i = 0; i < n; ++i) {
      cplx acc(0.0, 0.0);
      for (std::size_t k = 0; k <= i; ++k) acc += cov.chol[i * n + k] * z[k];
      out.data[p * n + i] = acc;
    }
  }
  return out;
}

PathEnsemble sample_paths_spectral(const SpectralMeasure& nu, std::span<const Coords> window,
                                   std::size_t m, const SeedRecord& seed) {
  if (m < 1) throw invalid_argument("sample_paths_spectral: need at least one path");
  if (!nu.is_atomic_plus_uniform())
    throw invalid_argument(
        "sample_paths_spectral supports atoms plus the full uniform component only");

  PathEnsemble out;
  out.desc = nu.descriptor();
  out.window.reserve(window.size());
  for (const auto& w : window) out.window.push_back(canonicalize(out.desc, w));
  out.paths = m;
  out.seed = seed;
  out.data.assign(m * window.size(), cplx(0.0, 0.0));
  out.build_index();

  const auto& atoms = nu.atoms();
  const bool real_mode = nu.is_symmetric();
  out.real_field = real_mode;

  // Precompute character values over the window.
  const std::size_t n = out.window.size();
  std::vector<cplx> table(atoms.size() * n);
  for (std::size_t j = 0; j < atoms.size(); ++j)
    for (std::size_t i = 0; i < n; ++i)
      table[j * n + i] = char_eval(atoms[j].chi, out.window[i]);

  // For the real route, pair each atom with its negation; self-conjugate
  // atoms contribute a single real amplitude, one member of each pair is
  // marked primary and carries two amplitudes (cos/sin).
  std::vector<int> pair_kind(atoms.size(), 0);  // 1 self, 2 primary, 0 secondary
  if (real_mode) {
    std::vector<bool> used(atoms.size(), false);
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      if (used[j]) continue;
      Character negated = atoms[j].chi;
      if (out.desc.is_lattice()) {
        for (auto& t : negated.theta) t = t == 0.0 ? 0.0 : 1.0 - t;
      } else {
        for (auto& r : negated.residues) r = r == 0 ? 0 : out.desc.modulus() - r;
      }
      if (character_distance(atoms[j].chi, negated) <= 1e-12) {
        pair_kind[j] = 1;
        used[j] = true;
      } else {
        pair_kind[j] = 2;
        used[j] = true;
        for (std::size_t k = j + 1; k < atoms.size(); ++k)
          if (!used[k] && character_distance(atoms[k].chi, negated) <= 1e-12) {
            pair_kind[k] = 0;
            used[k] = true;
            break;
          }
      }
    }
  }

  const double uw = nu.full_uniform_weight();
  const double half = std::sqrt(0.5);
  for (std::size_t p = 0; p < m; ++p) {
    Rng rng = Rng::keyed(seed, std::array<std::int64_t, 1>{static_cast<std::int64_t>(p)});
    cplx* row = out.data.data() + p * n;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      const double w = atoms[j].weight;
      if (real_mode) {
        if (pair_kind[j] == 1) {
          const double amp = std::sqrt(w) * rng.normal();
          for (std::size_t i = 0; i < n; ++i) row[i] += amp * table[j * n + i].real();
        } else if (pair_kind[j] == 2) {
          // conjugate pair {chi, -chi}: sqrt(2w) (A cos + B sin)
          const double a = std::sqrt(2.0 * w) * rng.normal();
          const double b = std::sqrt(2.0 * w) * rng.normal();
          for (std::size_t i = 0; i < n; ++i)
            row[i] += a * table[j * n + i].real() + b * table[j * n + i].imag();
        }
      } else {
        const cplx amp =
            std::sqrt(w) * cplx(half * rng.normal(), half * rng.normal());
        for (std::size_t i = 0; i < n; ++i) row[i] += amp * table[j * n + i];
      }
    }
    if (uw > 0.0) {
      const double s = std::sqrt(uw);
      for (std::size_t i = 0; i < n; ++i) {
        if (real_mode)
          row[i] += cplx(s * rng.normal(), 0.0);
        else
          row[i] += s * cplx(half * rng.normal(), half * rng.normal());
      }
    }
  }
  return out;
}

MeanEstimate ensemble_correlation(const PathEnsemble& ens, std::span<const std::int64_t> h) {
  const std::int64_t ih = ens.index_of(h);
  const std::int64_t i0 = ens.index_of(Coords(ens.desc.rank(), 0));
  if (ih < 0 || i0 < 0)
    throw invalid_argument("ensemble_correlation: lag or identity outside the window");
  cplx acc(0.0, 0.0);
  std::vector<cplx> vals(ens.paths);
  for (std::size_t p = 0; p < ens.paths; ++p) {
    vals[p] = ens.at(p, ih) * std::conj(ens.at(p, i0));
    acc += vals[p];
  }
  MeanEstimate out;
  out.n = ens.paths;
  out.value = acc / static_cast<double>(ens.paths);
  double var = 0.0;
  for (const cplx& v : vals) var += std::norm(v - out.value);
  var /= std::max<std::size_t>(ens.paths - 1, 1);
  out.std_error = std::sqrt(var / static_cast<double>(ens.paths));
  return out;
}

MeanEstimate ensemble_mean(const PathEnsemble& ens, std::span<const std::int64_t> at) {
  const std::int64_t idx = ens.index_of(at);
  if (idx < 0) throw invalid_argument("ensemble_mean: coordinate outside the window");
  cplx acc(0.0, 0.0);
  for (std::size_t p = 0; p < ens.paths; ++p) acc += ens.at(p, idx);
  MeanEstimate out;
  out.n = ens.paths;
  out.value = acc / static_cast<double>(ens.paths);
  double var = 0.0;
  for (std::size_t p = 0; p < ens.paths; ++p) var += std::norm(ens.at(p, idx) - out.value);
  var /= std::max<std::size_t>(ens.paths - 1, 1);
  out.std_error = std::sqrt(var / static_cast<double>(ens.paths));
  return out;
}

namespace {

// (base, shifted) window indices for every element of F; throws on underflow.
std::vector<std::pair<std::int64_t, std::int64_t>> correlation_pairs(
    const PathEnsemble& ens, std::span<const std::int64_t> h, const FinitePart& f_set) {
  if (f_set.empty()) throw invalid_argument("path_time_correlation: empty average set");
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  pairs.reserve(f_set.size());
  Coords shifted(h.size());
  for (std::size_t e = 0; e < f_set.size(); ++e) {
    auto g = f_set.at(e);
    for (std::size_t i = 0; i < h.size(); ++i) shifted[i] = g[i] + h[i];
    const std::int64_t a = ens.index_of(g);
    const std::int64_t b = ens.index_of(shifted);
    if (a < 0 || b < 0)
      throw invalid_argument("path_time_correlation: F + {0,h} escapes the window");
    pairs.emplace_back(a, b);
  }
  return pairs;
}

}  // namespace

cplx path_time_correlation(const PathEnsemble& ens, std::size_t path,
                           std::span<const std::int64_t> h, const FinitePart& f_set) {
  if (path >= ens.paths) throw invalid_argument("path index out of range");
  const auto pairs = correlation_pairs(ens, h, f_set);
  cplx acc(0.0, 0.0);
  for (const auto& [a, b] : pairs) acc += ens.at(path, b) * std::conj(ens.at(path, a));
  return acc / static_cast<double>(pairs.size());
}

std::vector<cplx> path_time_correlation_all(const PathEnsemble& ens,
                                            std::span<const std::int64_t> h,
                                            const FinitePart& f_set) {
  const auto pairs = correlation_pairs(ens, h, f_set);
  std::vector<cplx> out(ens.paths);
  for (std::size_t p = 0; p < ens.paths; ++p) {
    cplx acc(0.0, 0.0);
    for (const auto& [a, b] : pairs) acc += ens.at(p, b) * std::conj(ens.at(p, a));
    out[p] = acc / static_cast<double>(pairs.size());
  }
  return out;
}

}  // namespace pdk
