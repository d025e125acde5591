#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "spectral.hpp"
#include "types.hpp"

namespace pdk {

struct OutPaths {
  std::optional<std::string> structured;
  std::optional<std::string> rows;
  std::optional<std::string> plotdata;
  std::optional<std::string> values_text;
  std::optional<std::string> values_bin;
  std::optional<std::string> provenance;
  std::optional<std::string> ensemble_text;
};

/// Parsed and validated run configuration. Top-level keys: group,
/// measure | phi, command, params, seed, out. Unknown keys are rejected;
/// measure weights must sum to 1 (renormalization refused); seed is
/// mandatory for stochastic commands (enforced at dispatch).
struct RunConfig {
  GroupDescriptor group;
  std::optional<SpectralMeasure> measure;
  std::optional<std::string> phi_name;
  std::string command;
  nlohmann::json params;  // command-specific, validated at dispatch
  std::optional<std::uint64_t> seed;
  OutPaths out;
  nlohmann::json echo;  // canonical config document for provenance
};

/// Parses config text (JSON). Parse errors carry line/column; validation
/// errors name the offending field.
RunConfig parse_config(const std::string& text);

/// Measure component list parser, shared by configs and the C API:
/// [{"type": "atom"|"uniform"|"uniform_box"|"trig_poly", ..., "weight": w}].
SpectralMeasure parse_measure(const GroupDescriptor& group, const nlohmann::json& spec);

}  // namespace pdk
