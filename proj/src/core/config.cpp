#include "config.hpp"

#include <algorithm>

namespace pdk {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* k) { return it.key() == k; }) == allowed.end())
      throw invalid_argument("unknown key \"" + it.key() + "\" in " + where);
  }
}

double require_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw invalid_argument("field \"" + std::string(key) + "\" missing or not numeric in " +
                           where);
  return obj[key].get<double>();
}

std::vector<double> number_list(const json& v, const char* key, const std::string& where) {
  if (!v.is_array()) throw invalid_argument("field \"" + std::string(key) + "\" must be a list in " + where);
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw invalid_argument("field \"" + std::string(key) + "\" must hold numbers in " + where);
    out.push_back(x.get<double>());
  }
  return out;
}

Coords integer_list(const json& v, const char* key, const std::string& where) {
  if (!v.is_array()) throw invalid_argument("field \"" + std::string(key) + "\" must be a list in " + where);
  Coords out;
  for (const auto& x : v) {
    if (!x.is_number_integer())
      throw invalid_argument("field \"" + std::string(key) + "\" must hold integers in " + where);
    out.push_back(x.get<std::int64_t>());
  }
  return out;
}

}  // namespace

SpectralMeasure parse_measure(const GroupDescriptor& group, const json& spec) {
  if (!spec.is_object() || !spec.contains("components"))
    throw invalid_argument("measure must be an object with a \"components\" list");
  reject_unknown_keys(spec, {"components"}, "measure");
  const json& comps = spec["components"];
  if (!comps.is_array() || comps.empty())
    throw invalid_argument("measure \"components\" must be a nonempty list");

  std::vector<SpectralMeasure::Atom> atoms;
  std::vector<SpectralMeasure::UniformBox> boxes;
  std::vector<SpectralMeasure::TrigPoly> polys;
  double uniform_weight = 0.0;
  double weight_sum = 0.0;

  for (std::size_t i = 0; i < comps.size(); ++i) {
    const json& c = comps[i];
    const std::string where = "measure component " + std::to_string(i);
    if (!c.is_object() || !c.contains("type"))
      throw invalid_argument(where + " must be an object with a \"type\"");
    const std::string type = c["type"].get<std::string>();
    const double weight = require_number(c, "weight", where);
    weight_sum += weight;

    if (type == "atom") {
      Character chi{group, {}, {}};
      if (group.is_lattice()) {
        reject_unknown_keys(c, {"type", "theta", "weight"}, where);
        if (!c.contains("theta")) throw invalid_argument(where + ": atom needs \"theta\"");
        chi.theta = number_list(c["theta"], "theta", where);
        if (std::cmp_not_equal(chi.theta.size(), group.rank()))
          throw invalid_argument(where + ": theta length does not match the group rank");
      } else {
        reject_unknown_keys(c, {"type", "residues", "weight"}, where);
        if (!c.contains("residues")) throw invalid_argument(where + ": atom needs \"residues\"");
        chi.residues = integer_list(c["residues"], "residues", where);
        if (std::cmp_not_equal(chi.residues.size(), group.rank()))
          throw invalid_argument(where + ": residues length does not match the group rank");
      }
      atoms.push_back({std::move(chi), weight});
    } else if (type == "uniform") {
      reject_unknown_keys(c, {"type", "weight"}, where);
      uniform_weight += weight;
    } else if (type == "uniform_box") {
      reject_unknown_keys(c, {"type", "lo", "hi", "weight"}, where);
      if (!c.contains("lo") || !c.contains("hi"))
        throw invalid_argument(where + ": uniform_box needs \"lo\" and \"hi\"");
      SpectralMeasure::UniformBox box;
      box.lo = number_list(c["lo"], "lo", where);
      box.hi = number_list(c["hi"], "hi", where);
      box.weight = weight;
      boxes.push_back(std::move(box));
    } else if (type == "trig_poly") {
      reject_unknown_keys(c, {"type", "coeffs", "weight"}, where);
      if (!c.contains("coeffs") || !c["coeffs"].is_array())
        throw invalid_argument(where + ": trig_poly needs a \"coeffs\" list");
      SpectralMeasure::TrigPoly poly;
      poly.weight = weight;
      std::map<std::int64_t, cplx> by_lag;
      for (const auto& entry : c["coeffs"]) {
        if (!entry.is_array() || entry.size() != 3)
          throw invalid_argument(where + ": coeffs entries are [h, re, im]");
        const std::int64_t h = entry[0].get<std::int64_t>();
        if (h < 0) throw invalid_argument(where + ": coeffs are given for h >= 0");
        by_lag[h] = cplx(entry[1].get<double>(), entry[2].get<double>());
      }
      const std::int64_t max_lag = by_lag.empty() ? 0 : by_lag.rbegin()->first;
      poly.coeffs.assign(static_cast<std::size_t>(max_lag) + 1, cplx(0.0, 0.0));
      for (const auto& [h, v] : by_lag) poly.coeffs[static_cast<std::size_t>(h)] = v;
      polys.push_back(std::move(poly));
    } else {
      throw invalid_argument(where + ": unknown component type \"" + type + "\"");
    }
  }

  if (std::abs(weight_sum - 1.0) > 1e-9)
    throw invalid_argument("weights: measure components sum to " + std::to_string(weight_sum) +
                           ", must sum to 1 (renormalization refused)");
  return SpectralMeasure::make(group, std::move(atoms), std::move(boxes), std::move(polys),
                               uniform_weight);
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    // translate the byte offset into line/column
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < err.byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw invalid_argument("config parse error at line " + std::to_string(line) + ", column " +
                           std::to_string(col) + ": " + err.what());
  }
  if (!doc.is_object()) throw invalid_argument("config must be a JSON object");
  reject_unknown_keys(doc, {"group", "measure", "phi", "command", "params", "seed", "out"},
                      "config");

  RunConfig cfg;
  if (!doc.contains("group") || !doc["group"].is_string())
    throw invalid_argument("field \"group\" is required (e.g. \"Z\", \"Z^2\", \"C(4)^10\")");
  cfg.group = GroupDescriptor::parse(doc["group"].get<std::string>());

  if (!doc.contains("command") || !doc["command"].is_string())
    throw invalid_argument("field \"command\" is required");
  cfg.command = doc["command"].get<std::string>();

  if (doc.contains("measure") && doc.contains("phi"))
    throw invalid_argument("give either \"measure\" or \"phi\", not both");
  if (doc.contains("measure")) cfg.measure = parse_measure(cfg.group, doc["measure"]);
  if (doc.contains("phi")) {
    if (!doc["phi"].is_string()) throw invalid_argument("field \"phi\" must be a catalog name");
    cfg.phi_name = doc["phi"].get<std::string>();
  }

  if (doc.contains("params")) {
    if (!doc["params"].is_object()) throw invalid_argument("field \"params\" must be an object");
    cfg.params = doc["params"];
  } else {
    cfg.params = json::object();
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() || doc["seed"].get<std::int64_t>() < 0)
      throw invalid_argument("field \"seed\" must be a nonnegative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }

  if (doc.contains("out")) {
    const json& out = doc["out"];
    if (!out.is_object()) throw invalid_argument("field \"out\" must be an object");
    reject_unknown_keys(out,
                        {"structured", "rows", "plotdata", "values_text", "values_bin",
                         "provenance", "ensemble_text"},
                        "out");
    auto path = [&](const char* key) -> std::optional<std::string> {
      if (!out.contains(key)) return std::nullopt;
      if (!out[key].is_string()) throw invalid_argument(std::string("out.") + key + " must be a path");
      return out[key].get<std::string>();
    };
    cfg.out.structured = path("structured");
    cfg.out.rows = path("rows");
    cfg.out.plotdata = path("plotdata");
    cfg.out.values_text = path("values_text");
    cfg.out.values_bin = path("values_bin");
    cfg.out.provenance = path("provenance");
    cfg.out.ensemble_text = path("ensemble_text");
  }

  cfg.echo = doc;
  return cfg;
}

}  // namespace pdk
