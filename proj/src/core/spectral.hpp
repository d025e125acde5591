#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "group.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace pdk {

struct CharacterSample {
  std::vector<Character> characters;
  SeedRecord seed;
};

/// A probability measure on the dual group: atoms plus simple continuous
/// components. Lattice duals support uniform sub-boxes of [0,1)^d and, in
/// one dimension, nonnegative trigonometric-polynomial densities; cyclic
/// duals support atoms and the uniform measure only. Component weights must
/// sum to one; renormalization is refused.
class SpectralMeasure {
public:
  struct Atom {
    Character chi;
    double weight;
  };
  struct UniformBox {
    std::vector<double> lo, hi;  // inside [0, 1]
    double weight;
  };
  /// Density p(theta) = sum_h c_h e^{2 pi i h theta} with c_{-h} = conj(c_h),
  /// c_0 = 1, verified nonnegative on a 2^12-point grid.
  struct TrigPoly {
    std::vector<cplx> coeffs;  // index 0..max_lag stores c_0..c_H
    double weight;
  };

  static SpectralMeasure point_mass(const Character& chi) {
    return SpectralMeasure(chi.desc, {Atom{chi, 1.0}}, {}, {}, 0.0);
  }
  /// Uniform (Haar) measure on the full dual.
  static SpectralMeasure uniform(const GroupDescriptor& desc);
  static SpectralMeasure make(const GroupDescriptor& desc, std::vector<Atom> atoms,
                              std::vector<UniformBox> boxes, std::vector<TrigPoly> polys,
                              double uniform_weight);

  const GroupDescriptor& descriptor() const { return desc_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<UniformBox>& uniform_boxes() const { return boxes_; }
  const std::vector<TrigPoly>& trig_polys() const { return polys_; }
  double full_uniform_weight() const { return uniform_weight_; }
  /// True when the measure is atoms plus (optionally) the full uniform
  /// component; such measures admit exact finite spectral samplers.
  bool is_atomic_plus_uniform() const { return boxes_.empty() && polys_.empty(); }
  /// True when the measure is invariant under chi -> -chi, so its transform
  /// is real-valued.
  bool is_symmetric() const;

  /// nu-hat(g) = integral of chi(g) d nu(chi); closed form per component.
  cplx fourier(std::span<const std::int64_t> g) const;
  cplx fourier(const GroupElement& g) const;

  /// nu({chi}): total weight of atoms matching chi to 1e-12 per coordinate.
  double atom_weight(const Character& chi) const;

  /// n i.i.d. draws. Trig-poly components are rejection sampled against the
  /// coefficient-sum envelope with a 10^4-proposal budget per draw.
  CharacterSample sample(std::int64_t n, const SeedRecord& seed) const;
  Character sample_one(Rng& rng) const;

  /// Canonical text form, used as the provenance digest.
  std::string digest() const;

private:
  SpectralMeasure(GroupDescriptor desc, std::vector<Atom> atoms, std::vector<UniformBox> boxes,
                  std::vector<TrigPoly> polys, double uniform_weight);

  GroupDescriptor desc_;
  std::vector<Atom> atoms_;
  std::vector<UniformBox> boxes_;
  std::vector<TrigPoly> polys_;
  double uniform_weight_ = 0.0;  // full-dual uniform component
  std::vector<double> component_weights_;
  std::vector<double> poly_envelopes_;
};

/// f_S(gamma) = (1/|S|) sum_{g in S} (gamma - chi)(g); equals 1 at gamma = chi.
cplx fejer_window_eval(const FinitePart& s_set, const Character& chi, const Character& gamma);

/// Circle distance between dual points, max over coordinates.
double character_distance(const Character& a, const Character& b);

}  // namespace pdk
