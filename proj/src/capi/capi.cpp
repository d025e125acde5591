#include "posdefkit/posdefkit.h"

#include <cstring>
#include <string>

#include <json.hpp>

#include "core/config.hpp"
#include "core/constructor.hpp"
#include "core/dispatch.hpp"
#include "core/estimator.hpp"
#include "core/group.hpp"
#include "core/posdef.hpp"
#include "core/spectral.hpp"

namespace {

thread_local std::string g_last_error;

template <typename Fn>
pdk_status guarded(Fn&& fn) {
  try {
    fn();
    return PDK_OK;
  } catch (const pdk::invalid_argument& e) {
    g_last_error = e.what();
    return PDK_ERROR_INVALID;
  } catch (const pdk::numeric_error& e) {
    g_last_error = e.what();
    return PDK_ERROR_NUMERIC;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PDK_ERROR_INTERNAL;
  }
}

pdk::Coords span_coords(const pdk::GroupDescriptor& desc, const int64_t* p) {
  if (p == nullptr) throw pdk::invalid_argument("null element pointer");
  return pdk::Coords(p, p + desc.rank());
}

pdk::Character make_character(const pdk::GroupDescriptor& desc, const double* theta,
                              const int64_t* residues) {
  pdk::Character chi{desc, {}, {}};
  if (desc.is_lattice()) {
    if (theta == nullptr) throw pdk::invalid_argument("lattice characters need theta");
    chi.theta.assign(theta, theta + desc.rank());
  } else {
    if (residues == nullptr) throw pdk::invalid_argument("cyclic characters need residues");
    chi.residues.assign(residues, residues + desc.rank());
  }
  return chi;
}

}  // namespace

struct pdk_group {
  pdk::GroupDescriptor desc;
};
struct pdk_measure {
  pdk::SpectralMeasure nu;
};
struct pdk_phi {
  pdk::PosDefFn fn;
};
struct pdk_sequence {
  pdk::UnimodularSeq seq;
};
struct pdk_report {
  pdk::Report rep;
  std::string structured;
};

extern "C" {

const char* pdk_version(void) { return pdk::kLibraryVersion; }

const char* pdk_last_error(void) { return g_last_error.c_str(); }

pdk_status pdk_group_parse(const char* text, pdk_group** out) {
  return guarded([&] {
    if (text == nullptr || out == nullptr) throw pdk::invalid_argument("null argument");
    *out = new pdk_group{pdk::GroupDescriptor::parse(text)};
  });
}

void pdk_group_free(pdk_group* g) { delete g; }

int64_t pdk_group_rank(const pdk_group* g) { return g == nullptr ? 0 : g->desc.rank(); }

pdk_status pdk_group_add(const pdk_group* g, const int64_t* a, const int64_t* b, int64_t* sum) {
  return guarded([&] {
    const pdk::GroupElement r =
        pdk::add({g->desc, span_coords(g->desc, a)}, {g->desc, span_coords(g->desc, b)});
    std::memcpy(sum, r.coords.data(), sizeof(int64_t) * r.coords.size());
  });
}

pdk_status pdk_group_neg(const pdk_group* g, const int64_t* a, int64_t* out) {
  return guarded([&] {
    const pdk::GroupElement r = pdk::neg({g->desc, span_coords(g->desc, a)});
    std::memcpy(out, r.coords.data(), sizeof(int64_t) * r.coords.size());
  });
}

pdk_status pdk_group_char_eval(const pdk_group* g, const double* theta, const int64_t* residues,
                               const int64_t* elem, double* re, double* im) {
  return guarded([&] {
    const pdk::Character chi = make_character(g->desc, theta, residues);
    const pdk::cplx v = pdk::char_eval(chi, {g->desc, span_coords(g->desc, elem)});
    *re = v.real();
    *im = v.imag();
  });
}

pdk_status pdk_group_invariance_defect(const pdk_group* g, const int64_t* k_flat,
                                       int64_t k_count, const int64_t* f_flat, int64_t f_count,
                                       double* defect) {
  return guarded([&] {
    auto build = [&](const int64_t* flat, int64_t count) {
      std::vector<pdk::Coords> elems;
      elems.reserve(static_cast<std::size_t>(count));
      for (int64_t i = 0; i < count; ++i)
        elems.emplace_back(flat + i * g->desc.rank(), flat + (i + 1) * g->desc.rank());
      return pdk::FinitePart(g->desc, std::move(elems));
    };
    *defect = pdk::invariance_defect(build(k_flat, k_count), build(f_flat, f_count)).value();
  });
}

pdk_status pdk_group_s_of_g(const pdk_group* g, int* full_circle, int64_t* root_order) {
  return guarded([&] {
    const pdk::CircleRange range = pdk::s_of_g(g->desc);
    *full_circle = range.full_circle ? 1 : 0;
    *root_order = range.root_order.value_or(0);
  });
}

pdk_status pdk_measure_parse(const pdk_group* g, const char* components_json,
                             pdk_measure** out) {
  return guarded([&] {
    if (components_json == nullptr || out == nullptr)
      throw pdk::invalid_argument("null argument");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(components_json);
    } catch (const nlohmann::json::parse_error& e) {
      throw pdk::invalid_argument(std::string("measure spec parse error: ") + e.what());
    }
    *out = new pdk_measure{pdk::parse_measure(g->desc, doc)};
  });
}

void pdk_measure_free(pdk_measure* m) { delete m; }

pdk_status pdk_measure_fourier(const pdk_measure* m, const int64_t* g, double* re, double* im) {
  return guarded([&] {
    const pdk::cplx v =
        m->nu.fourier(std::span<const int64_t>(g, static_cast<std::size_t>(m->nu.descriptor().rank())));
    *re = v.real();
    *im = v.imag();
  });
}

pdk_status pdk_measure_atom_weight(const pdk_measure* m, const double* theta,
                                   const int64_t* residues, double* weight) {
  return guarded([&] {
    const pdk::Character chi = make_character(m->nu.descriptor(), theta, residues);
    *weight = m->nu.atom_weight(chi);
  });
}

pdk_status pdk_phi_catalog(const char* name, pdk_phi** out) {
  return guarded([&] {
    if (name == nullptr || out == nullptr) throw pdk::invalid_argument("null argument");
    *out = new pdk_phi{pdk::PosDefFn::example(name)};
  });
}

pdk_status pdk_phi_from_measure(const pdk_measure* m, pdk_phi** out) {
  return guarded([&] { *out = new pdk_phi{pdk::PosDefFn::from_measure(m->nu)}; });
}

void pdk_phi_free(pdk_phi* phi) { delete phi; }

pdk_status pdk_phi_eval(const pdk_phi* phi, const int64_t* g, double* re, double* im) {
  return guarded([&] {
    const pdk::cplx v = phi->fn.eval(
        std::span<const int64_t>(g, static_cast<std::size_t>(phi->fn.descriptor().rank())));
    *re = v.real();
    *im = v.imag();
  });
}

pdk_status pdk_phi_check_positive_definite(const pdk_phi* phi, const int64_t* windows_flat,
                                           const int64_t* window_sizes, int64_t n_windows,
                                           double tol_scale, int* passed,
                                           int64_t* worst_window, double* min_pivot) {
  return guarded([&] {
    const int64_t rank = phi->fn.descriptor().rank();
    std::vector<std::vector<pdk::Coords>> windows;
    const int64_t* p = windows_flat;
    for (int64_t w = 0; w < n_windows; ++w) {
      std::vector<pdk::Coords> window;
      for (int64_t e = 0; e < window_sizes[w]; ++e) {
        window.emplace_back(p, p + rank);
        p += rank;
      }
      windows.push_back(std::move(window));
    }
    const pdk::PdVerdict v = pdk::check_positive_definite(phi->fn, windows, tol_scale);
    *passed = v.passed ? 1 : 0;
    *worst_window = static_cast<int64_t>(v.worst_window);
    *min_pivot = v.min_value;
  });
}

pdk_status pdk_sequence_build_tiled(const pdk_measure* m, int64_t depth, const char* mode,
                                    double practical_constant, const int64_t* k_radii,
                                    int64_t n_radii, int64_t min_window, uint64_t seed,
                                    pdk_sequence** out) {
  return guarded([&] {
    if (depth < 1) throw pdk::invalid_argument("depth must be >= 1");
    pdk::Coords radii;
    if (k_radii != nullptr && n_radii > 0)
      radii.assign(k_radii, k_radii + n_radii);
    else
      for (int64_t k = 1; k <= depth; ++k) radii.push_back(k);
    const std::string mode_s = mode == nullptr ? "practical" : mode;
    pdk::PlanMode pm;
    if (mode_s == "strict")
      pm = pdk::PlanMode::strict;
    else if (mode_s == "practical")
      pm = pdk::PlanMode::practical;
    else
      throw pdk::invalid_argument("mode must be \"strict\" or \"practical\"");
    const auto& desc = m->nu.descriptor();
    const auto schedule = pdk::default_k_schedule(desc, radii);
    const auto tilings =
        pdk::build_box_tiling_sequence(desc, schedule, static_cast<std::size_t>(depth));
    const auto plan = pdk::plan_folner_subsequence(tilings, pm, static_cast<std::size_t>(depth),
                                                   practical_constant, min_window);
    pdk::SeedRecord rec;
    rec.seed = seed;
    *out = new pdk_sequence{pdk::build_sequence_tiled(m->nu, tilings, plan, rec)};
  });
}

pdk_status pdk_sequence_build_blocks(const pdk_measure* m, const int64_t* block_lengths,
                                     int64_t n_blocks, uint64_t seed, pdk_sequence** out) {
  return guarded([&] {
    pdk::SeedRecord rec;
    rec.seed = seed;
    *out = new pdk_sequence{pdk::build_sequence_blocks(
        m->nu, std::span<const int64_t>(block_lengths, static_cast<std::size_t>(n_blocks)),
        rec)};
  });
}

void pdk_sequence_free(pdk_sequence* s) { delete s; }

int64_t pdk_sequence_total(const pdk_sequence* s) { return s == nullptr ? 0 : s->seq.total(); }

pdk_status pdk_sequence_value(const pdk_sequence* s, int64_t flat_index, double* re,
                              double* im) {
  return guarded([&] {
    if (flat_index < 0 || flat_index >= s->seq.total())
      throw pdk::invalid_argument("sequence index out of range");
    const pdk::cplx v = s->seq.at_flat(flat_index);
    *re = v.real();
    *im = v.imag();
  });
}

int64_t pdk_sequence_effective_draws(const pdk_sequence* s) {
  return s == nullptr ? 0 : s->seq.provenance().effective_draws();
}

pdk_status pdk_sequence_correlation(const pdk_sequence* s, const int64_t* h, double delta,
                                    double* re, double* im, int64_t* n, double* radius) {
  return guarded([&] {
    const auto& desc = s->seq.descriptor();
    const pdk::Coords lag = span_coords(desc, h);
    pdk::Coords lo(desc.rank(), 0), hi(s->seq.window_sides());
    if (desc.is_lattice()) {
      for (int64_t i = 0; i < desc.rank(); ++i) {
        if (lag[static_cast<std::size_t>(i)] >= 0)
          hi[static_cast<std::size_t>(i)] -= lag[static_cast<std::size_t>(i)];
        else
          lo[static_cast<std::size_t>(i)] = -lag[static_cast<std::size_t>(i)];
        if (hi[static_cast<std::size_t>(i)] <= lo[static_cast<std::size_t>(i)])
          throw pdk::invalid_argument("lag leaves an empty averaging window");
      }
    }
    const pdk::FinitePart f_set = pdk::FinitePart::box(desc, lo, hi);
    pdk::CorrelationEstimate est = pdk::folner_correlation(s->seq, lag, f_set);
    pdk::certify(est, delta, &s->seq.provenance());
    *re = est.value.real();
    *im = est.value.imag();
    *n = est.n;
    *radius = est.certificate.radius;
  });
}

pdk_status pdk_sequence_atom_estimate(const pdk_sequence* s, const double* theta,
                                      const int64_t* residues, double* re, double* im) {
  return guarded([&] {
    const auto& desc = s->seq.descriptor();
    const pdk::Character chi = make_character(desc, theta, residues);
    const pdk::FinitePart f_set =
        pdk::FinitePart::box(desc, pdk::Coords(desc.rank(), 0), s->seq.window_sides());
    const pdk::CorrelationEstimate est = pdk::atom_estimate(s->seq, chi, f_set);
    *re = est.value.real();
    *im = est.value.imag();
  });
}

pdk_status pdk_hoeffding_bound(int64_t n, double x, double* bound) {
  return guarded([&] { *bound = pdk::hoeffding_bound(n, x); });
}

pdk_status pdk_complex_hoeffding_bound(int64_t n, double x, double* bound) {
  return guarded([&] { *bound = pdk::complex_hoeffding_bound(n, x); });
}

pdk_status pdk_certify_radius(int64_t n, double delta, double* radius) {
  return guarded([&] { *radius = pdk::certify_radius(n, delta); });
}

pdk_status pdk_run_config(const char* config_json, pdk_report** out) {
  return guarded([&] {
    if (config_json == nullptr || out == nullptr) throw pdk::invalid_argument("null argument");
    auto* r = new pdk_report{pdk::run_config_text(config_json), {}};
    r->structured = pdk::emit_structured(r->rep);
    *out = r;
  });
}

void pdk_report_free(pdk_report* r) { delete r; }

const char* pdk_report_structured(const pdk_report* r) { return r->structured.c_str(); }

const char* pdk_report_rows(const pdk_report* r) { return r->rep.rows.c_str(); }

const char* pdk_report_plotdata(const pdk_report* r) { return r->rep.plotdata.c_str(); }

int pdk_report_exit_code(const pdk_report* r) { return r == nullptr ? 2 : r->rep.exit_code; }

}  // extern "C"
