#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace pdk {

namespace {

constexpr double kWeightTol = 1e-12;
constexpr int kDensityGrid = 1 << 12;
constexpr int kRejectionBudget = 10000;

double circle_dist(double a, double b) {
  double d = std::abs(a - b);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SpectralMeasure::SpectralMeasure(GroupDescriptor desc, std::vector<Atom> atoms,
                                 std::vector<UniformBox> boxes, std::vector<TrigPoly> polys,
                                 double uniform_weight)
    : desc_(desc),
      atoms_(std::move(atoms)),
      boxes_(std::move(boxes)),
      polys_(std::move(polys)),
      uniform_weight_(uniform_weight) {
  double total = uniform_weight_;
  if (uniform_weight_ < 0.0) throw invalid_argument("uniform weight must be nonnegative");

  for (const auto& a : atoms_) {
    if (a.weight <= 0.0) throw invalid_argument("atom weights must be positive");
    if (!(a.chi.desc == desc_)) throw invalid_argument("atom character descriptor mismatch");
    if (desc_.is_lattice()) {
      for (double t : a.chi.theta)
        if (t < 0.0 || t >= 1.0) throw invalid_argument("atom theta must lie in [0,1)");
    } else {
      for (std::int64_t b : a.chi.residues)
        if (b < 0 || b >= desc_.modulus())
          throw invalid_argument("atom residues must lie in [0,m)");
    }
    total += a.weight;
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    for (std::size_t j = i + 1; j < atoms_.size(); ++j)
      if (character_distance(atoms_[i].chi, atoms_[j].chi) <= 1e-12)
        throw invalid_argument("duplicate atoms: measures must be specified deduplicated");

  if (!desc_.is_lattice() && (!boxes_.empty() || !polys_.empty()))
    throw invalid_argument("cyclic duals admit atoms and the uniform measure only");

  for (const auto& b : boxes_) {
    if (b.weight <= 0.0) throw invalid_argument("box weights must be positive");
    if (std::cmp_not_equal(b.lo.size(), desc_.rank()) ||
        std::cmp_not_equal(b.hi.size(), desc_.rank()))
      throw invalid_argument("uniform box rank mismatch");
    for (std::int64_t i = 0; i < desc_.rank(); ++i)
      if (!(0.0 <= b.lo[i] && b.lo[i] < b.hi[i] && b.hi[i] <= 1.0))
        throw invalid_argument("uniform box must satisfy 0 <= lo < hi <= 1");
    total += b.weight;
  }

  for (const auto& p : polys_) {
    if (p.weight <= 0.0) throw invalid_argument("trig poly weights must be positive");
    if (desc_.rank() != 1)
      throw invalid_argument("trig poly densities are supported over Z only");
    if (p.coeffs.empty() || std::abs(p.coeffs[0] - cplx(1.0, 0.0)) > 1e-9)
      throw invalid_argument("trig poly density must have unit mass (c_0 = 1)");
    // grid verification of nonnegativity
    double envelope = std::abs(p.coeffs[0]);
    for (std::size_t h = 1; h < p.coeffs.size(); ++h) envelope += 2.0 * std::abs(p.coeffs[h]);
    for (int j = 0; j < kDensityGrid; ++j) {
      const double theta = static_cast<double>(j) / kDensityGrid;
      double v = p.coeffs[0].real();
      for (std::size_t h = 1; h < p.coeffs.size(); ++h) {
        const cplx e(std::cos(kTwoPi * h * theta), std::sin(kTwoPi * h * theta));
        v += 2.0 * (p.coeffs[h] * e).real();
      }
      if (v < -1e-9 * std::max(1.0, envelope))
        throw invalid_argument("trig poly density is negative at theta=" + fmt_double(theta));
    }
    poly_envelopes_.push_back(envelope);
    total += p.weight;
  }

  if (std::abs(total - 1.0) > kWeightTol)
    throw invalid_argument("weights: components sum to " + fmt_double(total) +
                           ", renormalization refused");

  component_weights_.reserve(atoms_.size() + boxes_.size() + polys_.size() + 1);
  for (const auto& a : atoms_) component_weights_.push_back(a.weight);
  for (const auto& b : boxes_) component_weights_.push_back(b.weight);
  for (const auto& p : polys_) component_weights_.push_back(p.weight);
  component_weights_.push_back(uniform_weight_);
}

SpectralMeasure SpectralMeasure::uniform(const GroupDescriptor& desc) {
  return SpectralMeasure(desc, {}, {}, {}, 1.0);
}

SpectralMeasure SpectralMeasure::make(const GroupDescriptor& desc, std::vector<Atom> atoms,
                                      std::vector<UniformBox> boxes,
                                      std::vector<TrigPoly> polys, double uniform_weight) {
  return SpectralMeasure(desc, std::move(atoms), std::move(boxes), std::move(polys),
                         uniform_weight);
}

bool SpectralMeasure::is_symmetric() const {
  // atoms must pair up under negation; the uniform components are symmetric
  // except for off-center boxes.
  for (const auto& b : boxes_) {
    for (std::int64_t i = 0; i < desc_.rank(); ++i) {
      const double mid = b.lo[i] + b.hi[i];
      if (circle_dist(mid, 0.0) > 1e-12 && circle_dist(mid, 1.0) > 1e-12) return false;
    }
  }
  for (const auto& p : polys_) {
    for (const auto& c : p.coeffs)
      if (std::abs(c.imag()) > 1e-12) return false;
  }
  for (const auto& a : atoms_) {
    Character negated = a.chi;
    if (desc_.is_lattice()) {
      for (auto& t : negated.theta) {
        t = t == 0.0 ? 0.0 : 1.0 - t;
      }
    } else {
      for (auto& r : negated.residues) r = r == 0 ? 0 : desc_.modulus() - r;
    }
    bool matched = false;
    for (const auto& other : atoms_) {
      if (character_distance(other.chi, negated) <= 1e-12) {
        matched = std::abs(other.weight - a.weight) <= 1e-12;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

cplx SpectralMeasure::fourier(std::span<const std::int64_t> g) const {
  if (std::cmp_not_equal(g.size(), desc_.rank()))
    throw invalid_argument("descriptor mismatch in fourier");
  cplx out(0.0, 0.0);
  for (const auto& a : atoms_) out += a.weight * char_eval(a.chi, g);
  for (const auto& b : boxes_) {
    cplx factor(1.0, 0.0);
    for (std::int64_t i = 0; i < desc_.rank(); ++i) {
      const double len = b.hi[i] - b.lo[i];
      const double gi = static_cast<double>(g[i]);
      if (g[i] == 0) continue;  // unit factor for a normalized component
      const double arg = kTwoPi * 0.5 * gi * (b.lo[i] + b.hi[i]);
      const double sinc = std::sin(0.5 * kTwoPi * gi * len) / (0.5 * kTwoPi * gi * len);
      factor *= cplx(std::cos(arg), std::sin(arg)) * sinc;
    }
    out += b.weight * factor;
  }
  for (const auto& p : polys_) {
    // integral of e^{2 pi i g theta} p(theta) = c_{-g}
    const std::int64_t h = -g[0];
    const std::int64_t abs_h = std::abs(h);
    if (std::cmp_less(abs_h, p.coeffs.size())) {
      cplx c = p.coeffs[static_cast<std::size_t>(abs_h)];
      if (h < 0) c = std::conj(c);
      out += p.weight * c;
    }
  }
  if (uniform_weight_ > 0.0) {
    bool zero = true;
    if (desc_.is_lattice()) {
      for (auto v : g) zero = zero && v == 0;
    } else {
      for (auto v : g) zero = zero && (v % desc_.modulus() == 0);
    }
    if (zero) out += uniform_weight_;
  }
  return out;
}

cplx SpectralMeasure::fourier(const GroupElement& g) const {
  if (!(g.desc == desc_)) throw invalid_argument("descriptor mismatch in fourier");
  return fourier(std::span<const std::int64_t>(g.coords));
}

double SpectralMeasure::atom_weight(const Character& chi) const {
  double total = 0.0;
  for (const auto& a : atoms_)
    if (character_distance(a.chi, chi) <= 1e-12) total += a.weight;
  return total;
}

Character SpectralMeasure::sample_one(Rng& rng) const {
  const std::size_t idx = rng.categorical(component_weights_);
  const std::size_t n_atoms = atoms_.size();
  const std::size_t n_boxes = boxes_.size();
  const std::size_t n_polys = polys_.size();
  if (idx < n_atoms) return atoms_[idx].chi;
  if (idx < n_atoms + n_boxes) {
    const auto& b = boxes_[idx - n_atoms];
    Character chi{desc_, std::vector<double>(desc_.rank()), {}};
    for (std::int64_t i = 0; i < desc_.rank(); ++i)
      chi.theta[i] = b.lo[i] + (b.hi[i] - b.lo[i]) * rng.uniform01();
    return chi;
  }
  if (idx < n_atoms + n_boxes + n_polys) {
    const auto& p = polys_[idx - n_atoms - n_boxes];
    const double envelope = poly_envelopes_[idx - n_atoms - n_boxes];
    for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
      const double theta = rng.uniform01();
      double v = p.coeffs[0].real();
      for (std::size_t h = 1; h < p.coeffs.size(); ++h) {
        const cplx e(std::cos(kTwoPi * h * theta), std::sin(kTwoPi * h * theta));
        v += 2.0 * (p.coeffs[h] * e).real();
      }
      if (rng.uniform01() * envelope <= v) return Character{desc_, {theta}, {}};
    }
    throw numeric_error("trig poly rejection sampler exhausted its retry budget");
  }
  // full-dual uniform component
  if (desc_.is_lattice()) {
    Character chi{desc_, std::vector<double>(desc_.rank()), {}};
    for (auto& t : chi.theta) t = rng.uniform01();
    return chi;
  }
  Character chi{desc_, {}, Coords(desc_.rank())};
  for (auto& r : chi.residues)
    r = static_cast<std::int64_t>(rng.next_u64() % static_cast<std::uint64_t>(desc_.modulus()));
  return chi;
}

CharacterSample SpectralMeasure::sample(std::int64_t n, const SeedRecord& seed) const {
  if (n < 1) throw invalid_argument("sample count must be >= 1");
  Rng rng(seed.seed, seed.stream);
  CharacterSample out;
  out.seed = seed;
  out.characters.reserve(n);
  for (std::int64_t i = 0; i < n; ++i) out.characters.push_back(sample_one(rng));
  return out;
}

std::string SpectralMeasure::digest() const {
  std::string s = desc_.to_string() + ":";
  for (const auto& a : atoms_) {
    s += "atom(";
    if (desc_.is_lattice())
      for (double t : a.chi.theta) s += fmt_double(t) + ",";
    else
      for (auto r : a.chi.residues) s += std::to_string(r) + ",";
    s += "w=" + fmt_double(a.weight) + ")";
  }
  for (const auto& b : boxes_) {
    s += "box(";
    for (std::size_t i = 0; i < b.lo.size(); ++i)
      s += fmt_double(b.lo[i]) + ":" + fmt_double(b.hi[i]) + ",";
    s += "w=" + fmt_double(b.weight) + ")";
  }
  for (const auto& p : polys_) {
    s += "trig(";
    for (const auto& c : p.coeffs) s += fmt_double(c.real()) + "+" + fmt_double(c.imag()) + "i,";
    s += "w=" + fmt_double(p.weight) + ")";
  }
  if (uniform_weight_ > 0.0) s += "uniform(w=" + fmt_double(uniform_weight_) + ")";
  return s;
}

cplx fejer_window_eval(const FinitePart& s_set, const Character& chi, const Character& gamma) {
  if (s_set.empty()) throw invalid_argument("fejer_window_eval: S must be nonempty");
  const Character diff = char_sub(gamma, chi);
  cplx acc(0.0, 0.0);
  for (std::size_t i = 0; i < s_set.size(); ++i) acc += char_eval(diff, s_set.at(i));
  return acc / static_cast<double>(s_set.size());
}

double character_distance(const Character& a, const Character& b) {
  if (!(a.desc == b.desc)) return 2.0;
  double worst = 0.0;
  if (a.desc.is_lattice()) {
    for (std::size_t i = 0; i < a.theta.size(); ++i)
      worst = std::max(worst, circle_dist(a.theta[i], b.theta[i]));
  } else {
    for (std::size_t i = 0; i < a.residues.size(); ++i)
      if (a.residues[i] != b.residues[i]) return 2.0;
  }
  return worst;
}

}  // namespace pdk
