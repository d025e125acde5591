#include "estimator.hpp"

#include <algorithm>
#include <cmath>

#include "fft.hpp"

namespace pdk {

CorrelationEstimate folner_correlation(const UnimodularSeq& seq,
                                       std::span<const std::int64_t> h, const FinitePart& f_set) {
  if (f_set.empty()) throw invalid_argument("folner_correlation: empty average set");
  if (std::cmp_not_equal(h.size(), seq.descriptor().rank()))
    throw invalid_argument("folner_correlation: lag rank mismatch");
  cplx acc(0.0, 0.0);
  Coords shifted(h.size());
  const std::int64_t m = seq.descriptor().is_lattice() ? 0 : seq.descriptor().modulus();
  for (std::size_t e = 0; e < f_set.size(); ++e) {
    auto g = f_set.at(e);
    for (std::size_t i = 0; i < h.size(); ++i) {
      shifted[i] = g[i] + h[i];
      if (m != 0) shifted[i] = ((shifted[i] % m) + m) % m;
    }
    acc += seq.at(shifted) * std::conj(seq.at(g));
  }
  CorrelationEstimate out;
  out.lag.assign(h.begin(), h.end());
  out.n = static_cast<std::int64_t>(f_set.size());
  out.value = acc / static_cast<double>(out.n);
  return out;
}

cplx folner_correlation_z(std::span<const cplx> values, std::int64_t h) {
  const std::int64_t n = static_cast<std::int64_t>(values.size());
  if (h < 0 || h >= n) throw invalid_argument("folner_correlation_z: lag out of range");
  cplx acc(0.0, 0.0);
  for (std::int64_t g = 0; g + h < n; ++g) acc += values[g + h] * std::conj(values[g]);
  return acc / static_cast<double>(n - h);
}

std::vector<cplx> all_lags_fast(std::span<const cplx> values, std::int64_t h_max) {
  const std::int64_t n = static_cast<std::int64_t>(values.size());
  if (h_max >= n) throw invalid_argument("all_lags_fast: h_max must be below the window size");
  if (h_max < 0) throw invalid_argument("all_lags_fast: negative h_max");

  const std::size_t m = next_pow2(static_cast<std::size_t>(n + h_max + 1));
  std::vector<cplx> a(m, cplx(0.0, 0.0));
  std::copy(values.begin(), values.end(), a.begin());
  fft_pow2(a, false);
  for (auto& v : a) v = v * std::conj(v);
  fft_pow2(a, true);
  // inverse transform of |A|^2 holds sum_g c_{g+h} conj(c_g) at index h
  std::vector<cplx> out(static_cast<std::size_t>(h_max) + 1);
  for (std::int64_t h = 0; h <= h_max; ++h)
    out[static_cast<std::size_t>(h)] = a[static_cast<std::size_t>(h)] / static_cast<double>(n - h);
  return out;
}

CorrelationEstimate atom_estimate(const UnimodularSeq& seq, const Character& chi,
                                  const FinitePart& f_set) {
  if (f_set.empty()) throw invalid_argument("atom_estimate: empty average set");
  if (!(chi.desc == seq.descriptor()))
    throw invalid_argument("atom_estimate: descriptor mismatch");
  cplx acc(0.0, 0.0);
  for (std::size_t e = 0; e < f_set.size(); ++e) {
    auto g = f_set.at(e);
    acc += seq.at(g) * std::conj(char_eval(chi, g));
  }
  CorrelationEstimate out;
  out.lag.assign(seq.descriptor().rank(), 0);
  out.n = static_cast<std::int64_t>(f_set.size());
  out.value = acc / static_cast<double>(out.n);
  return out;
}

double hoeffding_bound(std::int64_t n, double x) {
  if (n < 1 || x <= 0.0) throw invalid_argument("hoeffding_bound requires n >= 1, x > 0");
  return 2.0 * std::exp(-2.0 * static_cast<double>(n) * x * x);
}

double complex_hoeffding_bound(std::int64_t n, double x) {
  if (n < 1 || x <= 0.0) throw invalid_argument("complex_hoeffding_bound requires n >= 1, x > 0");
  return 4.0 * std::exp(-0.5 * static_cast<double>(n) * x * x);
}

double certify_radius(std::int64_t n, double delta) {
  if (n < 1) throw invalid_argument("certify_radius requires n >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw invalid_argument("certify_radius requires delta in (0, 1)");
  return std::sqrt(2.0 * std::log(4.0 / delta) / static_cast<double>(n));
}

void certify(CorrelationEstimate& est, double delta, const Provenance* prov) {
  std::int64_t n_eff = est.n;
  bool heuristic = true;
  if (prov != nullptr) {
    const std::int64_t draws = prov->effective_draws();
    if (draws > 0) {
      n_eff = std::min(est.n, draws);
      heuristic = false;
    }
  }
  est.certificate.effective_n = n_eff;
  est.certificate.heuristic = heuristic;
  est.certificate.radius = certify_radius(n_eff, delta);
  est.certificate.bound = complex_hoeffding_bound(n_eff, est.certificate.radius);
}

}  // namespace pdk
