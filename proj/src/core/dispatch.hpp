#pragma once

#include <string>

#include <json.hpp>

#include "config.hpp"
#include "types.hpp"

namespace pdk {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr const char* kReportSchema = "posdefkit/report/1";

/// Command output. The structured document deliberately excludes the wall
/// clock so identical configs serialize byte-identically; wall time is
/// reported in the rows rendering only.
struct Report {
  nlohmann::json doc;
  std::string rows;
  std::string plotdata;
  /// extra files requested via out-paths: (path, exact bytes)
  std::vector<std::pair<std::string, std::string>> attachments;
  int exit_code = 0;
  double wall_ms = 0.0;
};

/// Executes the configured command. Validation problems throw
/// invalid_argument (exit 2), numerical rejections throw numeric_error
/// (exit 3); verification commands that complete with a failing verdict
/// return exit_code 3 in the report instead.
Report dispatch(const RunConfig& cfg);

std::string emit_structured(const Report& report);

/// Writes whatever out-paths the config names; sequence/ensemble exports are
/// produced by the commands themselves into the report's attachments.
void write_outputs(const Report& report, const RunConfig& cfg);

/// parse + dispatch + write_outputs.
Report run_config_text(const std::string& text);

}  // namespace pdk
