#include "posdef.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pdk {

double HermitianMatrix::max_abs_imag() const {
  double worst = 0.0;
  for (const auto& v : a_) worst = std::max(worst, std::abs(v.imag()));
  return worst;
}

// ---------------------------------------------------------------------------
// PosDefFn
// ---------------------------------------------------------------------------

struct PosDefFn::Impl {
  enum class Kind { Measure, CharacterFn, Tabulated, Sum } kind;
  GroupDescriptor desc;

  std::shared_ptr<const SpectralMeasure> nu;  // Measure
  Character chi;                              // CharacterFn
  double amplitude = 1.0;                     // CharacterFn
  std::map<Coords, cplx> table;               // Tabulated; misses evaluate to 0
  std::vector<std::pair<PosDefFn, double>> parts;  // Sum
  std::string label;
};

PosDefFn PosDefFn::from_measure(SpectralMeasure nu) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::Measure;
  impl->desc = nu.descriptor();
  impl->label = "measure[" + nu.digest() + "]";
  impl->nu = std::make_shared<const SpectralMeasure>(std::move(nu));
  return PosDefFn(std::move(impl));
}

PosDefFn PosDefFn::character_fn(Character chi, double amplitude) {
  if (!(amplitude > 0.0 && amplitude <= 1.0))
    throw invalid_argument("character amplitude must lie in (0, 1]");
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::CharacterFn;
  impl->desc = chi.desc;
  impl->chi = std::move(chi);
  impl->amplitude = amplitude;
  impl->label = "character";
  return PosDefFn(std::move(impl));
}

PosDefFn PosDefFn::tabulated(const GroupDescriptor& desc,
                             std::vector<std::pair<Coords, cplx>> entries) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::Tabulated;
  impl->desc = desc;
  impl->label = "table";
  for (auto& [raw, v] : entries) {
    Coords g = canonicalize(desc, raw);
    GroupElement e{desc, g};
    Coords ng = neg(e).coords;
    auto insert_checked = [&](const Coords& key, cplx value) {
      auto [it, fresh] = impl->table.emplace(key, value);
      if (!fresh && std::abs(it->second - value) > 1e-12)
        throw invalid_argument("tabulated entries violate conjugate symmetry");
    };
    insert_checked(g, v);
    insert_checked(ng, std::conj(v));
  }
  const Coords zero(desc.rank(), 0);
  auto it = impl->table.find(zero);
  if (it != impl->table.end()) {
    if (std::abs(it->second.imag()) > 1e-12 || it->second.real() < 0.0)
      throw invalid_argument("phi(0) must be real and nonnegative");
  }
  return PosDefFn(std::move(impl));
}

PosDefFn PosDefFn::sum_of(std::vector<std::pair<PosDefFn, double>> parts) {
  if (parts.empty()) throw invalid_argument("sum_of requires at least one part");
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::Sum;
  impl->desc = parts.front().first.descriptor();
  for (const auto& [fn, w] : parts) {
    if (w <= 0.0) throw invalid_argument("sum_of weights must be positive");
    if (!(fn.descriptor() == impl->desc))
      throw invalid_argument("sum_of parts must share a descriptor");
  }
  impl->parts = std::move(parts);
  impl->label = "sum";
  return PosDefFn(std::move(impl));
}

PosDefFn PosDefFn::example(std::string_view name) {
  const auto z = GroupDescriptor::lattice(1);
  if (name == "eigenvalue_sqrt2") {
    const double theta = std::sqrt(2.0) - 1.0;  // sqrt(2) mod 1
    return character_fn(Character{z, {theta}, {}}, 1.0);
  }
  if (name == "fejer1") {
    return tabulated(z, {{{0}, cplx(1.0, 0.0)}, {{1}, cplx(0.5, 0.0)}});
  }
  if (name == "delta") {
    return from_measure(SpectralMeasure::uniform(z));
  }
  if (name == "two_atom_half") {
    return from_measure(SpectralMeasure::make(
        z, {{Character{z, {0.0}, {}}, 0.5}, {Character{z, {0.5}, {}}, 0.5}}, {}, {}, 0.0));
  }
  throw invalid_argument("unknown catalog function: " + std::string(name));
}

cplx PosDefFn::eval(std::span<const std::int64_t> g) const {
  const auto& im = *impl_;
  switch (im.kind) {
    case Impl::Kind::Measure:
      return im.nu->fourier(g);
    case Impl::Kind::CharacterFn:
      return im.amplitude * char_eval(im.chi, g);
    case Impl::Kind::Tabulated: {
      Coords key = canonicalize(im.desc, g);
      auto it = im.table.find(key);
      return it == im.table.end() ? cplx(0.0, 0.0) : it->second;
    }
    case Impl::Kind::Sum: {
      cplx acc(0.0, 0.0);
      for (const auto& [fn, w] : im.parts) acc += w * fn.eval(g);
      return acc;
    }
  }
  return cplx(0.0, 0.0);
}

cplx PosDefFn::eval(const GroupElement& g) const {
  if (!(g.desc == impl_->desc)) throw invalid_argument("descriptor mismatch in phi eval");
  return eval(std::span<const std::int64_t>(g.coords));
}

const GroupDescriptor& PosDefFn::descriptor() const { return impl_->desc; }

const SpectralMeasure* PosDefFn::measure() const {
  return impl_->kind == Impl::Kind::Measure ? impl_->nu.get() : nullptr;
}

std::string PosDefFn::describe() const { return impl_->label; }

// ---------------------------------------------------------------------------
// Gram matrices and the PSD check
// ---------------------------------------------------------------------------

HermitianMatrix gram_matrix(const PosDefFn& phi, std::span<const Coords> pts) {
  if (pts.empty()) throw invalid_argument("gram_matrix: empty point list");
  const auto& desc = phi.descriptor();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (canonicalize(desc, pts[i]) == canonicalize(desc, pts[j]))
        throw invalid_argument("gram_matrix: duplicate points");

  HermitianMatrix m(pts.size());
  GroupElement gi{desc, {}}, gj{desc, {}};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    gi.coords = canonicalize(desc, pts[i]);
    for (std::size_t j = i; j < pts.size(); ++j) {
      gj.coords = canonicalize(desc, pts[j]);
      const GroupElement diff = add(gj, neg(gi));
      cplx v = phi.eval(diff);
      if (i == j) v = cplx(v.real(), 0.0);  // diagonal is phi(0), real
      m.at(i, j) = v;
      m.at(j, i) = std::conj(v);
    }
  }
  return m;
}

CholeskyVerdict pivoted_cholesky_check(HermitianMatrix a, double tol) {
  const std::size_t n = a.size();
  double min_pivot = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    // select the largest remaining diagonal entry
    std::size_t piv = k;
    for (std::size_t j = k + 1; j < n; ++j)
      if (a.at(j, j).real() > a.at(piv, piv).real()) piv = j;
    const double dmax = a.at(piv, piv).real();

    if (dmax <= tol) {
      // Remaining block is numerically rank-exhausted: PSD iff its diagonal
      // is not significantly negative and it carries no off-diagonal mass
      // (a Hermitian block with zero diagonal and nonzero entries is
      // indefinite).
      double dmin = dmax;
      double offmax = 0.0;
      for (std::size_t i = k; i < n; ++i) {
        dmin = std::min(dmin, a.at(i, i).real());
        for (std::size_t j = i + 1; j < n; ++j) offmax = std::max(offmax, std::abs(a.at(i, j)));
      }
      if (dmin < -tol) return {false, dmin};
      if (offmax > tol) return {false, -offmax};
      return {true, std::min(min_pivot, dmin)};
    }

    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a.at(k, c), a.at(piv, c));
      for (std::size_t r = 0; r < n; ++r) std::swap(a.at(r, k), a.at(r, piv));
    }
    min_pivot = std::min(min_pivot, dmax);
    // Schur complement update of the trailing block.
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx lik = a.at(i, k) / dmax;
      for (std::size_t j = i; j < n; ++j) {
        a.at(i, j) -= lik * std::conj(a.at(j, k));
        a.at(j, i) = std::conj(a.at(i, j));
      }
    }
  }
  return {true, min_pivot == std::numeric_limits<double>::infinity() ? 0.0 : min_pivot};
}

PdVerdict check_positive_definite(const PosDefFn& phi,
                                  std::span<const std::vector<Coords>> windows,
                                  double tol_scale) {
  PdVerdict out;
  out.passed = true;
  out.min_value = std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < windows.size(); ++w) {
    if (windows[w].size() > 64)
      throw invalid_argument("check_positive_definite: window too large (max 64)");
    HermitianMatrix m = gram_matrix(phi, windows[w]);
    const double tol = tol_scale * std::max(m.trace_real(), 1e-300);
    const CholeskyVerdict v = pivoted_cholesky_check(std::move(m), tol);
    if (v.min_pivot < out.min_value) {
      out.min_value = v.min_pivot;
      out.worst_window = w;
    }
    out.passed = out.passed && v.passed;
  }
  if (windows.empty()) out.min_value = 0.0;
  return out;
}

}  // namespace pdk
