#include "dispatch.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "constructor.hpp"
#include "estimator.hpp"
#include "gmsc.hpp"
#include "posdef.hpp"
#include "rotation.hpp"
#include "rng.hpp"

namespace pdk {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json cplx_json(cplx v) { return json::array({v.real(), v.imag()}); }

void check_params(const json& params, std::initializer_list<const char*> allowed,
                  const std::string& command) {
  for (auto it = params.begin(); it != params.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok)
      throw invalid_argument("unknown parameter \"" + it.key() + "\" for command " + command);
  }
}

std::int64_t int_param(const json& params, const char* key, std::int64_t fallback) {
  if (!params.contains(key)) return fallback;
  if (!params[key].is_number_integer())
    throw invalid_argument(std::string("parameter \"") + key + "\" must be an integer");
  return params[key].get<std::int64_t>();
}

double num_param(const json& params, const char* key, double fallback) {
  if (!params.contains(key)) return fallback;
  if (!params[key].is_number())
    throw invalid_argument(std::string("parameter \"") + key + "\" must be numeric");
  return params[key].get<double>();
}

std::string str_param(const json& params, const char* key, const std::string& fallback) {
  if (!params.contains(key)) return fallback;
  if (!params[key].is_string())
    throw invalid_argument(std::string("parameter \"") + key + "\" must be a string");
  return params[key].get<std::string>();
}

SeedRecord require_seed(const RunConfig& cfg, std::uint64_t stream) {
  if (!cfg.seed)
    throw invalid_argument("field \"seed\" is mandatory for stochastic commands");
  SeedRecord s;
  s.seed = *cfg.seed;
  s.stream = stream;
  return s;
}

PosDefFn phi_of(const RunConfig& cfg) {
  if (cfg.phi_name) return PosDefFn::example(*cfg.phi_name);
  if (cfg.measure) return PosDefFn::from_measure(*cfg.measure);
  throw invalid_argument("this command needs \"phi\" or \"measure\"");
}

const SpectralMeasure* measure_of(const RunConfig& cfg, const PosDefFn& phi) {
  if (cfg.measure) return &*cfg.measure;
  return phi.measure();
}

// lag vectors 0..h_max along the first axis, or an explicit lag_list
std::vector<Coords> lag_list(const RunConfig& cfg, std::int64_t fallback_hmax) {
  std::vector<Coords> lags;
  if (cfg.params.contains("lag_list")) {
    for (const auto& entry : cfg.params["lag_list"]) {
      Coords lag;
      for (const auto& v : entry) lag.push_back(v.get<std::int64_t>());
      if (std::cmp_not_equal(lag.size(), cfg.group.rank()))
        throw invalid_argument("lag_list entries must match the group rank");
      lags.push_back(std::move(lag));
    }
    return lags;
  }
  const std::int64_t h_max = int_param(cfg.params, "lags", fallback_hmax);
  for (std::int64_t h = 0; h <= h_max; ++h) {
    Coords lag(cfg.group.rank(), 0);
    lag[0] = h;
    lags.push_back(std::move(lag));
  }
  return lags;
}

std::vector<Coords> z_window(std::int64_t n) {
  std::vector<Coords> w;
  w.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) w.push_back({i});
  return w;
}

// ---------------------------------------------------------------------------
// sequence building shared by build-seq / estimate / atoms / realify
// ---------------------------------------------------------------------------

struct BuiltSequence {
  UnimodularSeq seq;
  json provenance;
};

json provenance_json(const UnimodularSeq& seq) {
  const Provenance& p = seq.provenance();
  json out;
  out["builder"] = p.builder;
  out["mode"] = p.mode;
  out["measure"] = p.measure_digest;
  out["seed"] = {{"generator", p.seed.generator}, {"seed", p.seed.seed}, {"stream", p.seed.stream}};
  json levels = json::array();
  for (const auto& l : p.levels) {
    levels.push_back({{"level", l.level},
                      {"tile_side", l.tile_side},
                      {"plan_size", l.plan_size},
                      {"fresh_centers", l.fresh_centers},
                      {"bad_tiles", l.bad_tiles},
                      {"subtile_fills", l.subtile_fills},
                      {"covered_points", l.covered_points},
                      {"shape_defect", l.shape_defect}});
  }
  out["levels"] = levels;
  out["block_bounds"] = p.block_bounds;
  out["effective_draws"] = p.effective_draws();
  json sides = json::array();
  for (auto s : seq.window_sides()) sides.push_back(s);
  out["window_sides"] = sides;
  return out;
}

BuiltSequence build_sequence(const RunConfig& cfg, const json& params) {
  check_params(params,
               {"builder", "depth", "mode", "practical_constant", "k_radii", "min_window",
                "block_lengths", "memory_cap"},
               "sequence");
  const std::string builder = str_param(params, "builder", "tiled");
  const SpectralMeasure* nu = cfg.measure ? &*cfg.measure : nullptr;
  PosDefFn phi = phi_of(cfg);
  if (nu == nullptr) nu = phi.measure();
  if (nu == nullptr)
    throw invalid_argument("sequence builders need a spectral measure (\"measure\" or a "
                           "measure-backed catalog \"phi\")");

  const SeedRecord seed = require_seed(cfg, 0);
  if (builder == "blocks") {
    if (!params.contains("block_lengths"))
      throw invalid_argument("blocks builder needs \"block_lengths\"");
    Coords lengths;
    for (const auto& v : params["block_lengths"]) lengths.push_back(v.get<std::int64_t>());
    UnimodularSeq seq = build_sequence_blocks(*nu, lengths, seed);
    json prov = provenance_json(seq);
    return {std::move(seq), std::move(prov)};
  }
  if (builder != "tiled") throw invalid_argument("builder must be \"tiled\" or \"blocks\"");

  const std::int64_t depth = int_param(params, "depth", 3);
  if (depth < 1) throw invalid_argument("depth must be >= 1");
  Coords radii;
  if (params.contains("k_radii")) {
    for (const auto& v : params["k_radii"]) radii.push_back(v.get<std::int64_t>());
  } else {
    for (std::int64_t k = 1; k <= depth; ++k) radii.push_back(k);
  }
  if (std::cmp_less(radii.size(), depth))
    throw invalid_argument("k_radii must list at least \"depth\" radii");
  const std::string mode_s = str_param(params, "mode", "practical");
  if (mode_s != "strict" && mode_s != "practical")
    throw invalid_argument("mode must be \"strict\" or \"practical\"");
  const PlanMode mode = mode_s == "strict" ? PlanMode::strict : PlanMode::practical;
  const double practical_constant = num_param(params, "practical_constant", 16.0);
  const std::int64_t min_window = int_param(params, "min_window", 0);
  const std::int64_t memory_cap = int_param(params, "memory_cap", std::int64_t{1} << 26);

  const auto schedule = default_k_schedule(cfg.group, radii);
  const TilingSequence tilings =
      build_box_tiling_sequence(cfg.group, schedule, static_cast<std::size_t>(depth));
  const FolnerSubPlan plan =
      plan_folner_subsequence(tilings, mode, static_cast<std::size_t>(depth),
                              practical_constant, min_window, memory_cap);
  UnimodularSeq seq = build_sequence_tiled(*nu, tilings, plan, seed);
  json prov = provenance_json(seq);
  json tiling_json = json::array();
  for (std::size_t k = 1; k <= tilings.depth(); ++k) {
    json sides = json::array();
    for (auto p : tilings.level(k).centers[0].periods) sides.push_back(p);
    tiling_json.push_back({{"level", k},
                           {"tile_sides", sides},
                           {"shape_defect", tilings.level(k).shape_defects[0].value()}});
  }
  prov["tilings"] = tiling_json;
  json plan_json = json::array();
  for (const auto& lvl : plan.levels) {
    json sides = json::array();
    for (auto s : lvl.f_sides) sides.push_back(s);
    plan_json.push_back({{"level", lvl.level},
                         {"f_sides", sides},
                         {"f_size", lvl.f_size},
                         {"defect", lvl.defect.value()},
                         {"defect_bound", lvl.defect_bound},
                         {"size_required", lvl.size_required}});
  }
  prov["plan"] = plan_json;
  return {std::move(seq), std::move(prov)};
}

void attach_sequence_exports(Report& rep, const RunConfig& cfg, const UnimodularSeq& seq,
                             const json& prov) {
  if (cfg.out.values_text) {
    std::string text = "# index re im\n";
    for (std::int64_t i = 0; i < seq.total(); ++i) {
      const cplx v = seq.at_flat(i);
      text += std::to_string(i) + " " + fmt(v.real()) + " " + fmt(v.imag()) + "\n";
    }
    rep.attachments.emplace_back(*cfg.out.values_text, std::move(text));
  }
  if (cfg.out.values_bin) {
    std::string bytes;
    bytes.resize(static_cast<std::size_t>(seq.total()) * 2 * sizeof(double));
    double* p = reinterpret_cast<double*>(bytes.data());
    for (std::int64_t i = 0; i < seq.total(); ++i) {
      const cplx v = seq.at_flat(i);
      p[2 * i] = v.real();
      p[2 * i + 1] = v.imag();
    }
    rep.attachments.emplace_back(*cfg.out.values_bin, std::move(bytes));
  }
  if (cfg.out.provenance)
    rep.attachments.emplace_back(*cfg.out.provenance, prov.dump(2) + "\n");
}

// F = [0, N - h) x [0, N) x ... for a lag along the first axis
FinitePart averaging_set(const GroupDescriptor& desc, const Coords& window_sides,
                         const Coords& lag, std::int64_t limit_n) {
  Coords lo(desc.rank(), 0), hi(window_sides.begin(), window_sides.end());
  if (limit_n > 0)
    for (auto& h : hi) h = std::min(h, limit_n);
  for (std::int64_t i = 0; i < desc.rank(); ++i) {
    if (lag[i] >= 0) {
      hi[i] -= lag[i];
    } else {
      lo[i] = -lag[i];
    }
    if (hi[i] <= lo[i])
      throw invalid_argument("lag (" + std::to_string(lag[i]) +
                             ") leaves an empty averaging window");
  }
  if (!desc.is_lattice()) {
    // cyclic windows wrap; average over the whole window
    lo.assign(desc.rank(), 0);
    hi.assign(window_sides.begin(), window_sides.end());
  }
  return FinitePart::box(desc, lo, hi);
}

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

Report cmd_check_pd(const RunConfig& cfg) {
  check_params(cfg.params, {"windows", "random_windows", "tol"}, "check-pd");
  const PosDefFn phi = phi_of(cfg);
  const double tol = num_param(cfg.params, "tol", 1e-9);

  std::vector<std::vector<Coords>> windows;
  if (cfg.params.contains("windows")) {
    for (const auto& w : cfg.params["windows"]) {
      std::vector<Coords> window;
      for (const auto& e : w) {
        if (e.is_number_integer())
          window.push_back({e.get<std::int64_t>()});
        else {
          Coords c;
          for (const auto& v : e) c.push_back(v.get<std::int64_t>());
          window.push_back(std::move(c));
        }
      }
      windows.push_back(std::move(window));
    }
  }
  if (cfg.params.contains("random_windows")) {
    const json& rw = cfg.params["random_windows"];
    check_params(rw, {"count", "size", "span"}, "random_windows");
    const std::int64_t count = int_param(rw, "count", 10);
    const std::int64_t size = int_param(rw, "size", 8);
    const std::int64_t span = int_param(rw, "span", 32);
    const SeedRecord seed = require_seed(cfg, 1);
    Rng rng(seed.seed, seed.stream);
    for (std::int64_t w = 0; w < count; ++w) {
      std::set<Coords> pts;
      while (std::cmp_less(pts.size(), size)) {
        Coords c(cfg.group.rank());
        for (auto& v : c)
          v = static_cast<std::int64_t>(rng.next_u64() % (2 * span + 1)) - span;
        pts.insert(canonicalize(cfg.group, c));
      }
      windows.emplace_back(pts.begin(), pts.end());
    }
  }
  if (windows.empty()) throw invalid_argument("check-pd needs \"windows\" or \"random_windows\"");

  const PdVerdict verdict = check_positive_definite(phi, windows, tol);

  Report rep;
  rep.doc["results"] = {{"passed", verdict.passed},
                        {"worst_window", verdict.worst_window},
                        {"min_pivot", verdict.min_value},
                        {"windows_tested", windows.size()},
                        {"verdict", verdict.passed ? "consistent with positive definiteness"
                                                   : "not positive definite"}};
  rep.exit_code = verdict.passed ? 0 : 3;
  std::ostringstream rows;
  rows << "windows=" << windows.size() << " passed=" << (verdict.passed ? "yes" : "no")
       << " min_pivot=" << fmt(verdict.min_value) << " worst_window=" << verdict.worst_window
       << "\n";
  rep.rows = rows.str();
  return rep;
}

Report cmd_gmsc_ensemble(const RunConfig& cfg) {
  check_params(cfg.params, {"window", "paths", "lags", "lag_list"}, "gmsc-ensemble");
  const PosDefFn phi = phi_of(cfg);
  const std::int64_t window_n = int_param(cfg.params, "window", 32);
  const std::int64_t paths = int_param(cfg.params, "paths", 20000);
  const SeedRecord seed = require_seed(cfg, 2);
  if (!cfg.group.is_lattice() || cfg.group.rank() != 1)
    throw invalid_argument("gmsc-ensemble windows are defined over Z");

  const auto window = z_window(window_n);
  const CovarianceMatrix cov = build_covariance(phi, window);
  const PathEnsemble ens = sample_paths(cov, static_cast<std::size_t>(paths), seed);

  Report rep;
  json results = json::array();
  std::ostringstream rows, plot;
  rows << "h target_re target_im est_re est_im se\n";
  plot << "h target_re target_im estimate_re estimate_im radius\n";
  double max_dev = 0.0;
  for (const Coords& lag : lag_list(cfg, std::min<std::int64_t>(window_n - 1, 16))) {
    const MeanEstimate e = ensemble_correlation(ens, lag);
    const cplx target = phi.eval(lag);
    const double dev = std::abs(e.value - target);
    max_dev = std::max(max_dev, dev);
    results.push_back({{"h", lag[0]},
                       {"target", cplx_json(target)},
                       {"estimate", cplx_json(e.value)},
                       {"std_error", e.std_error},
                       {"deviation", dev}});
    rows << lag[0] << " " << fmt(target.real()) << " " << fmt(target.imag()) << " "
         << fmt(e.value.real()) << " " << fmt(e.value.imag()) << " " << fmt(e.std_error) << "\n";
    plot << lag[0] << " " << fmt(target.real()) << " " << fmt(target.imag()) << " "
         << fmt(e.value.real()) << " " << fmt(e.value.imag()) << " " << fmt(3.0 * e.std_error)
         << "\n";
  }
  rep.doc["results"] = {{"lags", results},
                        {"max_deviation", max_dev},
                        {"jitter", cov.jitter},
                        {"real_field", cov.real_field},
                        {"paths", paths},
                        {"window", window_n}};
  rep.rows = rows.str();
  rep.plotdata = plot.str();

  if (cfg.out.ensemble_text) {
    std::string text = "# path values (one path per row, re im pairs)\n";
    const std::size_t limit = std::min<std::size_t>(ens.paths, 512);
    for (std::size_t p = 0; p < limit; ++p) {
      for (std::size_t i = 0; i < ens.window.size(); ++i) {
        const cplx v = ens.at(p, static_cast<std::int64_t>(i));
        text += fmt(v.real()) + " " + fmt(v.imag()) + (i + 1 < ens.window.size() ? " " : "");
      }
      text += "\n";
    }
    rep.attachments.emplace_back(*cfg.out.ensemble_text, std::move(text));
  }
  return rep;
}

Report cmd_gmsc_path(const RunConfig& cfg) {
  check_params(cfg.params, {"paths", "lag", "folner_n", "sampler"}, "gmsc-path");
  const PosDefFn phi = phi_of(cfg);
  const std::int64_t paths = int_param(cfg.params, "paths", 1000);
  const std::int64_t lag = int_param(cfg.params, "lag", 0);
  const std::int64_t folner_n = int_param(cfg.params, "folner_n", 10000);
  const SeedRecord seed = require_seed(cfg, 3);
  if (!cfg.group.is_lattice() || cfg.group.rank() != 1)
    throw invalid_argument("gmsc-path windows are defined over Z");

  const std::int64_t window_n = folner_n + std::max<std::int64_t>(lag, 0);
  const auto window = z_window(window_n);
  const std::string sampler = str_param(cfg.params, "sampler", "auto");
  const SpectralMeasure* nu = measure_of(cfg, phi);

  PathEnsemble ens;
  if (sampler == "dense" || (sampler == "auto" && window_n <= 256)) {
    ens = sample_paths(build_covariance(phi, window), static_cast<std::size_t>(paths), seed);
  } else {
    if (nu == nullptr || !nu->is_atomic_plus_uniform())
      throw invalid_argument("windows above 256 need an atoms-plus-uniform measure "
                             "for the spectral sampler");
    ens = sample_paths_spectral(*nu, window, static_cast<std::size_t>(paths), seed);
  }

  const FinitePart f_set = FinitePart::interval(0, folner_n);
  const Coords lagv{lag};
  const std::vector<cplx> vals = path_time_correlation_all(ens, lagv, f_set);
  cplx mean(0.0, 0.0);
  for (const cplx& v : vals) mean += v;
  mean /= static_cast<double>(vals.size());
  double var = 0.0;
  for (const cplx& v : vals) var += std::norm(v - mean);
  var /= std::max<std::size_t>(vals.size() - 1, 1);
  const double across_path_std = std::sqrt(var);
  const cplx target = phi.eval(lagv);

  Report rep;
  rep.doc["results"] = {{"lag", lag},
                        {"folner_n", folner_n},
                        {"paths", paths},
                        {"target", cplx_json(target)},
                        {"mean_over_paths", cplx_json(mean)},
                        {"across_path_std", across_path_std}};
  std::ostringstream rows;
  rows << "lag=" << lag << " folner_n=" << folner_n << " mean=" << fmt(mean.real()) << "+"
       << fmt(mean.imag()) << "i across_path_std=" << fmt(across_path_std) << " target="
       << fmt(target.real()) << "+" << fmt(target.imag()) << "i\n";
  rep.rows = rows.str();
  return rep;
}

RotationSystem rotation_system_of(const RunConfig& cfg) {
  if (cfg.measure) return rotation_from_measure(*cfg.measure);
  if (cfg.phi_name) {
    if (*cfg.phi_name == "eigenvalue_sqrt2") {
      Character chi{cfg.group, {std::sqrt(2.0) - 1.0}, {}};
      return make_rotation_system(cfg.group, {{1.0, chi}});
    }
    const PosDefFn phi = PosDefFn::example(*cfg.phi_name);
    if (phi.measure() != nullptr) return rotation_from_measure(*phi.measure());
  }
  throw invalid_argument("rotation needs an atomic \"measure\" or an atomic catalog \"phi\"");
}

Report cmd_rotation(const RunConfig& cfg) {
  check_params(cfg.params, {"lags", "lag_list", "orbit_n", "x0"}, "rotation");
  const RotationSystem sys = rotation_system_of(cfg);
  const std::int64_t orbit_n = int_param(cfg.params, "orbit_n", 100000);
  std::vector<double> x0(sys.atoms.size(), 0.0);
  if (cfg.params.contains("x0")) {
    x0.clear();
    for (const auto& v : cfg.params["x0"]) x0.push_back(v.get<double>());
    if (x0.size() != sys.atoms.size())
      throw invalid_argument("x0 must list one phase per rotation atom");
  }

  Report rep;
  json results = json::array();
  std::ostringstream rows, plot;
  rows << "h exact_re exact_im orbit_re orbit_im abs_err\n";
  plot << "h target_re target_im estimate_re estimate_im radius\n";
  double max_err = 0.0;
  for (const Coords& lag : lag_list(cfg, 8)) {
    const cplx exact = rotation_correlation(sys, lag);
    const cplx orbit = rotation_orbit_average(sys, x0, orbit_n, lag);
    const double err = std::abs(exact - orbit);
    max_err = std::max(max_err, err);
    results.push_back({{"h", lag[0]},
                       {"exact", cplx_json(exact)},
                       {"orbit_average", cplx_json(orbit)},
                       {"abs_error", err}});
    rows << lag[0] << " " << fmt(exact.real()) << " " << fmt(exact.imag()) << " "
         << fmt(orbit.real()) << " " << fmt(orbit.imag()) << " " << fmt(err) << "\n";
    plot << lag[0] << " " << fmt(exact.real()) << " " << fmt(exact.imag()) << " "
         << fmt(orbit.real()) << " " << fmt(orbit.imag()) << " " << fmt(err) << "\n";
  }
  rep.doc["results"] = {{"lags", results}, {"orbit_n", orbit_n}, {"max_abs_error", max_err}};
  rep.rows = rows.str();
  rep.plotdata = plot.str();
  return rep;
}

Report cmd_build_seq(const RunConfig& cfg) {
  BuiltSequence built = build_sequence(cfg, cfg.params);
  Report rep;
  cplx mean(0.0, 0.0);
  double worst_mod = 0.0;
  for (std::int64_t i = 0; i < built.seq.total(); ++i) {
    const cplx v = built.seq.at_flat(i);
    mean += v;
    worst_mod = std::max(worst_mod, std::abs(std::abs(v) - 1.0));
  }
  mean /= static_cast<double>(built.seq.total());
  rep.doc["results"] = {{"total", built.seq.total()},
                        {"mean", cplx_json(mean)},
                        {"max_modulus_defect", worst_mod},
                        {"provenance", built.provenance}};
  std::ostringstream rows;
  rows << "total=" << built.seq.total() << " mean=" << fmt(mean.real()) << "+"
       << fmt(mean.imag()) << "i max_modulus_defect=" << fmt(worst_mod) << "\n";
  rep.rows = rows.str();
  attach_sequence_exports(rep, cfg, built.seq, built.provenance);
  return rep;
}

Report cmd_estimate(const RunConfig& cfg) {
  check_params(cfg.params, {"sequence", "lags", "lag_list", "delta", "window_n"}, "estimate");
  if (!cfg.params.contains("sequence"))
    throw invalid_argument("estimate needs a \"sequence\" builder object");
  BuiltSequence built = build_sequence(cfg, cfg.params["sequence"]);
  const UnimodularSeq& seq = built.seq;
  const double delta = num_param(cfg.params, "delta", 0.01);
  const std::int64_t window_n = int_param(cfg.params, "window_n", 0);
  const PosDefFn phi = phi_of(cfg);

  Report rep;
  json results = json::array();
  std::ostringstream rows, plot;
  rows << "h re im n radius bound\n";
  plot << "h target_re target_im estimate_re estimate_im radius\n";
  for (const Coords& lag : lag_list(cfg, 16)) {
    const FinitePart f_set = averaging_set(cfg.group, seq.window_sides(), lag, window_n);
    CorrelationEstimate est = folner_correlation(seq, lag, f_set);
    certify(est, delta, &seq.provenance());
    const cplx target = phi.eval(lag);
    results.push_back({{"h", lag[0]},
                       {"estimate", cplx_json(est.value)},
                       {"target", cplx_json(target)},
                       {"n", est.n},
                       {"effective_n", est.certificate.effective_n},
                       {"radius", est.certificate.radius},
                       {"bound", est.certificate.bound},
                       {"heuristic", est.certificate.heuristic}});
    rows << lag[0] << " " << fmt(est.value.real()) << " " << fmt(est.value.imag()) << " "
         << est.n << " " << fmt(est.certificate.radius) << " " << fmt(est.certificate.bound)
         << "\n";
    plot << lag[0] << " " << fmt(target.real()) << " " << fmt(target.imag()) << " "
         << fmt(est.value.real()) << " " << fmt(est.value.imag()) << " "
         << fmt(est.certificate.radius) << "\n";
  }
  rep.doc["results"] = {{"lags", results}, {"delta", delta}, {"provenance", built.provenance}};
  rep.rows = rows.str();
  rep.plotdata = plot.str();
  attach_sequence_exports(rep, cfg, seq, built.provenance);
  return rep;
}

Report cmd_atoms(const RunConfig& cfg) {
  check_params(cfg.params, {"sequence", "characters", "delta"}, "atoms");
  if (!cfg.params.contains("sequence"))
    throw invalid_argument("atoms needs a \"sequence\" builder object");
  if (!cfg.params.contains("characters"))
    throw invalid_argument("atoms needs a \"characters\" list");
  BuiltSequence built = build_sequence(cfg, cfg.params["sequence"]);
  const double delta = num_param(cfg.params, "delta", 0.01);
  const SpectralMeasure* nu = cfg.measure ? &*cfg.measure : phi_of(cfg).measure();

  const FinitePart f_set =
      FinitePart::box(cfg.group, Coords(cfg.group.rank(), 0), built.seq.window_sides());

  Report rep;
  json results = json::array();
  std::ostringstream rows;
  rows << "character est_re est_im abs n radius\n";
  for (const auto& entry : cfg.params["characters"]) {
    Character chi{cfg.group, {}, {}};
    if (cfg.group.is_lattice()) {
      for (const auto& v : entry) chi.theta.push_back(v.get<double>());
      if (std::cmp_not_equal(chi.theta.size(), cfg.group.rank()))
        throw invalid_argument("character entries must match the group rank");
    } else {
      for (const auto& v : entry) chi.residues.push_back(v.get<std::int64_t>());
      if (std::cmp_not_equal(chi.residues.size(), cfg.group.rank()))
        throw invalid_argument("character entries must match the group rank");
    }
    CorrelationEstimate est = atom_estimate(built.seq, chi, f_set);
    certify(est, delta, &built.seq.provenance());
    json row = {{"estimate", cplx_json(est.value)},
                {"abs", std::abs(est.value)},
                {"n", est.n},
                {"radius", est.certificate.radius},
                {"effective_n", est.certificate.effective_n}};
    if (cfg.group.is_lattice())
      row["theta"] = chi.theta;
    else
      row["residues"] = chi.residues;
    if (nu != nullptr) row["true_weight"] = nu->atom_weight(chi);
    results.push_back(std::move(row));
    rows << (cfg.group.is_lattice() ? fmt(chi.theta[0]) : std::to_string(chi.residues[0])) << " "
         << fmt(est.value.real()) << " " << fmt(est.value.imag()) << " "
         << fmt(std::abs(est.value)) << " " << est.n << " " << fmt(est.certificate.radius)
         << "\n";
  }
  rep.doc["results"] = {{"characters", results},
                        {"delta", delta},
                        {"provenance", built.provenance}};
  rep.rows = rows.str();
  return rep;
}

Report cmd_realify(const RunConfig& cfg) {
  check_params(cfg.params, {"sequence", "lags", "lag_list"}, "realify");
  if (!cfg.params.contains("sequence"))
    throw invalid_argument("realify needs a \"sequence\" builder object");
  BuiltSequence built = build_sequence(cfg, cfg.params["sequence"]);
  const RealPairSeq pair = realify(built.seq);

  Report rep;
  json results = json::array();
  std::ostringstream rows;
  rows << "h paired re_complex abs_diff\n";
  double max_diff = 0.0;
  for (const Coords& lag : lag_list(cfg, 16)) {
    const FinitePart f_set = averaging_set(cfg.group, built.seq.window_sides(), lag, 0);
    const double paired = paired_correlation(pair, lag, f_set);
    const CorrelationEstimate complex_est = folner_correlation(built.seq, lag, f_set);
    const double diff = std::abs(paired - complex_est.value.real());
    max_diff = std::max(max_diff, diff);
    results.push_back({{"h", lag[0]},
                       {"paired", paired},
                       {"complex_re", complex_est.value.real()},
                       {"abs_diff", diff}});
    rows << lag[0] << " " << fmt(paired) << " " << fmt(complex_est.value.real()) << " "
         << fmt(diff) << "\n";
  }
  rep.doc["results"] = {{"lags", results},
                        {"max_abs_diff", max_diff},
                        {"provenance", built.provenance}};
  rep.rows = rows.str();

  if (cfg.out.values_text) {
    std::string text = "# index c1 c2\n";
    for (std::size_t i = 0; i < pair.component_1.size(); ++i)
      text += std::to_string(i) + " " + fmt(pair.component_1[i]) + " " +
              fmt(pair.component_2[i]) + "\n";
    rep.attachments.emplace_back(*cfg.out.values_text, std::move(text));
  }
  return rep;
}

Report cmd_tilings_verify(const RunConfig& cfg) {
  check_params(cfg.params,
               {"sides", "k_radii", "depth", "window_lo", "window_hi", "corrupt_level",
                "corrupt_offset"},
               "tilings-verify");
  TilingSequence seq = [&] {
    if (cfg.params.contains("sides")) {
      Coords sides;
      for (const auto& v : cfg.params["sides"]) sides.push_back(v.get<std::int64_t>());
      return box_tilings_with_sides(cfg.group, sides);
    }
    const std::int64_t depth = int_param(cfg.params, "depth", 3);
    Coords radii;
    if (cfg.params.contains("k_radii"))
      for (const auto& v : cfg.params["k_radii"]) radii.push_back(v.get<std::int64_t>());
    else
      for (std::int64_t k = 1; k <= depth; ++k) radii.push_back(k);
    return build_box_tiling_sequence(cfg.group, default_k_schedule(cfg.group, radii),
                                     static_cast<std::size_t>(depth));
  }();

  if (cfg.params.contains("corrupt_level")) {
    Coords offset(cfg.group.rank(), 1);
    if (cfg.params.contains("corrupt_offset")) {
      offset.clear();
      for (const auto& v : cfg.params["corrupt_offset"]) offset.push_back(v.get<std::int64_t>());
    }
    seq = seq.with_corrupted_offset(
        static_cast<std::size_t>(cfg.params["corrupt_level"].get<std::int64_t>()), offset);
  }

  Coords lo(cfg.group.rank(), -100), hi(cfg.group.rank(), 101);
  if (cfg.params.contains("window_lo")) {
    lo.clear();
    for (const auto& v : cfg.params["window_lo"]) lo.push_back(v.get<std::int64_t>());
  }
  if (cfg.params.contains("window_hi")) {
    hi.clear();
    for (const auto& v : cfg.params["window_hi"]) hi.push_back(v.get<std::int64_t>());
  }
  if (!cfg.group.is_lattice()) {
    lo.assign(cfg.group.rank(), 0);
    hi.assign(cfg.group.rank(), cfg.group.modulus());
  }
  const FinitePart window = FinitePart::box(cfg.group, lo, hi);
  const CongruenceReport crep = verify_congruence(seq, window);

  Report rep;
  json res = {{"passed", crep.passed},
              {"partition_ok", crep.partition_ok},
              {"congruence_ok", crep.congruence_ok},
              {"window_size", window.size()},
              {"depth", seq.depth()}};
  if (crep.witness) {
    res["witness"] = *crep.witness;
    res["witness_level"] = crep.witness_level;
    res["message"] = crep.message;
  }
  rep.doc["results"] = res;
  rep.exit_code = crep.passed ? 0 : 3;
  std::ostringstream rows;
  rows << "passed=" << (crep.passed ? "yes" : "no") << " partition="
       << (crep.partition_ok ? "ok" : "bad") << " congruence="
       << (crep.congruence_ok ? "ok" : "bad");
  if (crep.witness) {
    rows << " witness=(";
    for (std::size_t i = 0; i < crep.witness->size(); ++i)
      rows << (i ? "," : "") << (*crep.witness)[i];
    rows << ")@level" << crep.witness_level << " " << crep.message;
  }
  rows << "\n";
  rep.rows = rows.str();
  return rep;
}

Report cmd_demo_eigenvalue(const RunConfig& cfg) {
  check_params(cfg.params, {"paths", "folner_lengths", "lags"}, "demo-eigenvalue");
  RunConfig sub = cfg;
  sub.phi_name = "eigenvalue_sqrt2";
  sub.measure.reset();

  const std::int64_t paths = int_param(cfg.params, "paths", 1000);
  Coords folner_lengths{100, 10000};
  if (cfg.params.contains("folner_lengths")) {
    folner_lengths.clear();
    for (const auto& v : cfg.params["folner_lengths"])
      folner_lengths.push_back(v.get<std::int64_t>());
  }
  const SeedRecord seed = require_seed(cfg, 4);

  // the spectral measure of e^{2 pi i n sqrt(2)}: a single atom
  const Character atom{cfg.group, {std::sqrt(2.0) - 1.0}, {}};
  const SpectralMeasure nu = SpectralMeasure::point_mass(atom);
  const PosDefFn phi = PosDefFn::example("eigenvalue_sqrt2");
  const RotationSystem sys = make_rotation_system(cfg.group, {{1.0, atom}});

  Report rep;
  json lag_rows = json::array();
  std::ostringstream rows;
  rows << "# ensemble vs rotation correlations\n";
  rows << "h target_re target_im ensemble_re ensemble_im rotation_re rotation_im\n";
  const std::int64_t max_len = *std::max_element(folner_lengths.begin(), folner_lengths.end());
  const std::int64_t h_max = int_param(cfg.params, "lags", 4);
  const auto window = z_window(max_len + h_max);
  const PathEnsemble ens =
      sample_paths_spectral(nu, window, static_cast<std::size_t>(paths), seed);
  for (std::int64_t h = 0; h <= h_max; ++h) {
    const Coords lag{h};
    const MeanEstimate e = ensemble_correlation(ens, lag);
    const cplx target = phi.eval(lag);
    const cplx rot = rotation_correlation(sys, lag);
    lag_rows.push_back({{"h", h},
                        {"target", cplx_json(target)},
                        {"ensemble", cplx_json(e.value)},
                        {"ensemble_se", e.std_error},
                        {"rotation", cplx_json(rot)}});
    rows << h << " " << fmt(target.real()) << " " << fmt(target.imag()) << " "
         << fmt(e.value.real()) << " " << fmt(e.value.imag()) << " " << fmt(rot.real()) << " "
         << fmt(rot.imag()) << "\n";
  }

  // single-path time averages do not settle: the across-path spread of the
  // h=0 Folner average stays of order one as N grows
  json spread_rows = json::array();
  rows << "# across-path spread of single-path time averages at h=0\n";
  rows << "N across_path_std\n";
  for (std::int64_t n : folner_lengths) {
    const std::vector<cplx> vals =
        path_time_correlation_all(ens, Coords{0}, FinitePart::interval(0, n));
    cplx mean(0.0, 0.0);
    for (const cplx& v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double var = 0.0;
    for (const cplx& v : vals) var += std::norm(v - mean);
    var /= std::max<std::size_t>(vals.size() - 1, 1);
    spread_rows.push_back({{"N", n}, {"across_path_std", std::sqrt(var)}});
    rows << n << " " << fmt(std::sqrt(var)) << "\n";
  }

  rep.doc["results"] = {{"lags", lag_rows},
                        {"time_average_spread", spread_rows},
                        {"paths", paths}};
  rep.rows = rows.str();
  return rep;
}

Report cmd_demo_product(const RunConfig& cfg) {
  check_params(cfg.params, {"paths", "window", "lags", "orbit_n"}, "demo-product");
  const std::int64_t paths = int_param(cfg.params, "paths", 20000);
  const std::int64_t h_max = int_param(cfg.params, "lags", 8);
  const std::int64_t window_n = int_param(cfg.params, "window", h_max + 1);
  const std::int64_t orbit_n = int_param(cfg.params, "orbit_n", 100000);
  const SeedRecord seed = require_seed(cfg, 5);

  const PosDefFn phi_w = PosDefFn::example("delta");
  const CovarianceMatrix cov = build_covariance(phi_w, z_window(window_n));
  const PathEnsemble weak = sample_paths(cov, static_cast<std::size_t>(paths), seed);
  const Character atom{cfg.group, {std::sqrt(2.0) - 1.0}, {}};
  const RotationSystem compact = make_rotation_system(cfg.group, {{1.0, atom}});

  std::vector<Coords> lags;
  for (std::int64_t h = 0; h <= h_max && h < window_n; ++h) lags.push_back(Coords{h});
  const SumRepReport srep = sum_representation_check(weak, phi_w, compact, lags, orbit_n);

  Report rep;
  json rows_json = json::array();
  std::ostringstream rows;
  rows << "h combined_re combined_im target_re target_im budget cross pass\n";
  for (const auto& row : srep.rows) {
    rows_json.push_back({{"h", row.lag[0]},
                         {"combined", cplx_json(row.combined)},
                         {"target", cplx_json(row.target)},
                         {"budget", row.budget},
                         {"cross_mag", row.cross_mag},
                         {"cross_budget", row.cross_budget},
                         {"pass", row.pass}});
    rows << row.lag[0] << " " << fmt(row.combined.real()) << " " << fmt(row.combined.imag())
         << " " << fmt(row.target.real()) << " " << fmt(row.target.imag()) << " "
         << fmt(row.budget) << " " << fmt(row.cross_mag) << " " << (row.pass ? "yes" : "no")
         << "\n";
  }
  rep.doc["results"] = {{"preconditions_ok", srep.preconditions_ok},
                        {"weak_mean", cplx_json(srep.weak_mean)},
                        {"weak_mean_se", srep.weak_mean_se},
                        {"rows", rows_json},
                        {"passed", srep.passed}};
  rep.exit_code = srep.passed ? 0 : 3;
  rep.rows = rows.str();
  return rep;
}

}  // namespace

Report dispatch(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  if (cfg.command == "check-pd")
    rep = cmd_check_pd(cfg);
  else if (cfg.command == "gmsc-ensemble")
    rep = cmd_gmsc_ensemble(cfg);
  else if (cfg.command == "gmsc-path")
    rep = cmd_gmsc_path(cfg);
  else if (cfg.command == "rotation")
    rep = cmd_rotation(cfg);
  else if (cfg.command == "build-seq")
    rep = cmd_build_seq(cfg);
  else if (cfg.command == "estimate")
    rep = cmd_estimate(cfg);
  else if (cfg.command == "atoms")
    rep = cmd_atoms(cfg);
  else if (cfg.command == "realify")
    rep = cmd_realify(cfg);
  else if (cfg.command == "tilings-verify")
    rep = cmd_tilings_verify(cfg);
  else if (cfg.command == "demo-eigenvalue")
    rep = cmd_demo_eigenvalue(cfg);
  else if (cfg.command == "demo-product")
    rep = cmd_demo_product(cfg);
  else
    throw invalid_argument("unknown command \"" + cfg.command + "\"");

  rep.doc["schema"] = kReportSchema;
  rep.doc["version"] = kLibraryVersion;
  rep.doc["command"] = cfg.command;
  rep.doc["config"] = cfg.echo;
  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                          start)
                    .count();
  rep.rows = "# posdefkit " + cfg.command + "\n" + rep.rows +
             "# wall_ms=" + fmt(rep.wall_ms) + "\n";
  return rep;
}

std::string emit_structured(const Report& report) { return report.doc.dump(2) + "\n"; }

void write_outputs(const Report& report, const RunConfig& cfg) {
  auto write = [](const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw invalid_argument("cannot write output file: " + path);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  };
  if (cfg.out.structured) write(*cfg.out.structured, emit_structured(report));
  if (cfg.out.rows) write(*cfg.out.rows, report.rows);
  if (cfg.out.plotdata) write(*cfg.out.plotdata, report.plotdata);
  for (const auto& [path, bytes] : report.attachments) write(path, bytes);
}

Report run_config_text(const std::string& text) {
  const RunConfig cfg = parse_config(text);
  Report rep = dispatch(cfg);
  write_outputs(rep, cfg);
  return rep;
}

}  // namespace pdk
