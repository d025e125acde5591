#include "rotation.hpp"

#include <cmath>

namespace pdk {

RotationSystem make_rotation_system(const GroupDescriptor& desc,
                                    std::vector<std::pair<double, Character>> atoms) {
  RotationSystem sys;
  sys.desc = desc;
  for (auto& [w, chi] : atoms) {
    if (w <= 0.0) throw invalid_argument("rotation weights must be positive");
    if (!(chi.desc == desc)) throw invalid_argument("rotation atom descriptor mismatch");
    sys.weights.push_back(w);
    sys.atoms.push_back(std::move(chi));
  }
  if (sys.atoms.empty()) throw invalid_argument("rotation system needs at least one atom");
  for (std::size_t i = 0; i < sys.atoms.size(); ++i)
    for (std::size_t j = i + 1; j < sys.atoms.size(); ++j)
      if (character_distance(sys.atoms[i], sys.atoms[j]) <= 1e-12)
        throw invalid_argument("rotation atoms must be pairwise distinct");
  return sys;
}

RotationSystem rotation_from_measure(const SpectralMeasure& nu) {
  if (!nu.uniform_boxes().empty() || !nu.trig_polys().empty() || nu.full_uniform_weight() > 0.0)
    throw invalid_argument("rotation systems require a purely atomic measure");
  std::vector<std::pair<double, Character>> atoms;
  for (const auto& a : nu.atoms()) atoms.emplace_back(a.weight, a.chi);
  return make_rotation_system(nu.descriptor(), std::move(atoms));
}

cplx rotation_correlation(const RotationSystem& sys, std::span<const std::int64_t> h) {
  cplx acc(0.0, 0.0);
  for (std::size_t j = 0; j < sys.atoms.size(); ++j)
    acc += sys.weights[j] * char_eval(sys.atoms[j], h);
  return acc;
}

namespace {

// phase of x0_j advanced by g under atom j, as a fraction of a turn
double orbit_phase(const RotationSystem& sys, std::span<const double> x0, std::size_t j,
                   std::span<const std::int64_t> g) {
  double p = x0.empty() ? 0.0 : x0[j];
  const Character& chi = sys.atoms[j];
  if (sys.desc.is_lattice()) {
    long double acc = p;
    for (std::size_t i = 0; i < g.size(); ++i)
      acc += static_cast<long double>(g[i]) * static_cast<long double>(chi.theta[i]);
    acc -= std::floor(acc);
    return static_cast<double>(acc);
  }
  std::int64_t dot = 0;
  const std::int64_t m = sys.desc.modulus();
  for (std::size_t i = 0; i < g.size(); ++i) dot = (dot + g[i] * chi.residues[i]) % m;
  double frac = p + static_cast<double>(((dot % m) + m) % m) / static_cast<double>(m);
  return frac - std::floor(frac);
}

cplx observable(const RotationSystem& sys, std::span<const double> phases) {
  cplx acc(0.0, 0.0);
  for (std::size_t j = 0; j < sys.atoms.size(); ++j)
    acc += std::sqrt(sys.weights[j]) *
           cplx(std::cos(kTwoPi * phases[j]), std::sin(kTwoPi * phases[j]));
  return acc;
}

}  // namespace

cplx rotation_orbit_average(const RotationSystem& sys, std::span<const double> x0,
                            std::int64_t n, std::span<const std::int64_t> h) {
  if (n < 1) throw invalid_argument("orbit average needs n >= 1");
  if (!x0.empty() && std::cmp_not_equal(x0.size(), sys.atoms.size()))
    throw invalid_argument("start point dimension must match the atom count");
  const std::int64_t r = sys.desc.rank();
  if (std::cmp_not_equal(h.size(), r)) throw invalid_argument("lag rank mismatch");

  const std::size_t j_count = sys.atoms.size();
  std::vector<double> ph(j_count), ph_shift(j_count);
  cplx acc(0.0, 0.0);
  Coords g(r, 0), gh(r);
  std::int64_t count = 0;
  for (;;) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(r); ++i) gh[i] = g[i] + h[i];
    for (std::size_t j = 0; j < j_count; ++j) {
      ph[j] = orbit_phase(sys, x0, j, g);
      ph_shift[j] = orbit_phase(sys, x0, j, gh);
    }
    acc += observable(sys, ph_shift) * std::conj(observable(sys, ph));
    ++count;
    std::int64_t axis = r - 1;
    while (axis >= 0) {
      if (++g[axis] < n) break;
      g[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  return acc / static_cast<double>(count);
}

SumRepReport sum_representation_check(const PathEnsemble& weak, const PosDefFn& phi_w,
                                      const RotationSystem& compact,
                                      std::span<const Coords> lags, std::int64_t orbit_n) {
  SumRepReport rep;
  const Coords zero(weak.desc.rank(), 0);
  const MeanEstimate mean0 = ensemble_mean(weak, zero);
  rep.weak_mean = mean0.value;
  rep.weak_mean_se = mean0.std_error;
  // the construction requires integral of the weak observable to vanish
  rep.preconditions_ok = std::abs(mean0.value) <= 3.0 * std::max(mean0.std_error, 1e-15);

  // orbit mean of conj(f_c) over [0, orbit_n)^d from the default start point
  cplx orbit_mean(0.0, 0.0);
  {
    const std::vector<double> x0(compact.atoms.size(), 0.0);
    Coords g(compact.desc.rank(), 0);
    std::vector<double> ph(compact.atoms.size());
    std::int64_t count = 0;
    for (;;) {
      for (std::size_t j = 0; j < compact.atoms.size(); ++j)
        ph[j] = orbit_phase(compact, x0, j, g);
      orbit_mean += std::conj(observable(compact, ph));
      ++count;
      std::int64_t axis = compact.desc.rank() - 1;
      while (axis >= 0) {
        if (++g[axis] < orbit_n) break;
        g[axis] = 0;
        --axis;
      }
      if (axis < 0) break;
    }
    orbit_mean /= static_cast<double>(count);
  }

  rep.passed = rep.preconditions_ok;
  for (const Coords& lag : lags) {
    SumRepRow row;
    row.lag = lag;
    const MeanEstimate e = ensemble_correlation(weak, lag);
    const cplx compact_part = rotation_correlation(compact, lag);
    row.combined = e.value + compact_part;
    row.target = phi_w.eval(lag) + compact_part;
    row.budget = 4.0 * std::max(e.std_error, 1e-15);
    const MeanEstimate mean_h = ensemble_mean(weak, lag);
    row.cross_mag = std::abs(mean_h.value) * std::abs(orbit_mean);
    row.cross_budget = 3.0 * std::max(rep.weak_mean_se, 1e-15);
    row.pass = std::abs(row.combined - row.target) <= row.budget &&
               row.cross_mag <= row.cross_budget;
    rep.passed = rep.passed && row.pass;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace pdk
