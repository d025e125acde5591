#pragma once

#include <span>
#include <vector>

#include "sequence.hpp"
#include "spectral.hpp"
#include "types.hpp"

namespace pdk {

/// Concentration certificate for an averaged estimate: a confidence radius x
/// with the bound 4 exp(-n x^2 / 2) on the probability of exceeding it.
/// When the averaged terms are tile-correlated rather than i.i.d., n is the
/// independent-draw count from provenance; without provenance the raw term
/// count is used and the certificate is flagged heuristic.
struct Certificate {
  double radius = 0.0;
  double bound = 0.0;
  std::int64_t effective_n = 0;
  bool heuristic = true;
};

struct CorrelationEstimate {
  Coords lag;
  cplx value;
  std::int64_t n = 0;  // number of averaged terms
  Certificate certificate;
};

/// (1/|F|) sum_{g in F} seq(g+h) conj(seq(g)). F + {0, h} must lie inside the
/// sequence window.
CorrelationEstimate folner_correlation(const UnimodularSeq& seq,
                                       std::span<const std::int64_t> h, const FinitePart& f_set);

/// Same average over a raw Z sequence on [0, N) with F = [0, N-h).
cplx folner_correlation_z(std::span<const cplx> values, std::int64_t h);

/// All lags 0..h_max of a Z sequence on [0, N), each normalized over
/// F = [0, N-h), via cyclic convolution of the zero-padded sequence with its
/// conjugate reverse. Matches direct summation to 1e-9.
std::vector<cplx> all_lags_fast(std::span<const cplx> values, std::int64_t h_max);

/// (1/|F|) sum_{g in F} seq(g) conj(chi(g)) -- the atom-mass estimator.
CorrelationEstimate atom_estimate(const UnimodularSeq& seq, const Character& chi,
                                  const FinitePart& f_set);

/// 2 exp(-2 n x^2) -- real Hoeffding tail for means of [0,1] variables.
double hoeffding_bound(std::int64_t n, double x);
/// 4 exp(-n x^2 / 2) -- closed-disc version for complex means.
double complex_hoeffding_bound(std::int64_t n, double x);

/// Smallest radius x with 4 exp(-n x^2 / 2) <= delta.
double certify_radius(std::int64_t n, double delta);

/// Attaches a certificate at confidence delta. Provenance, when supplied,
/// replaces the raw term count with the independent-draw count.
void certify(CorrelationEstimate& est, double delta, const Provenance* prov);

}  // namespace pdk
