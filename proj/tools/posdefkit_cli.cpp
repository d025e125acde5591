// Command-line front end. Links the posdefkit shared library through its C
// API only; config parsing and all numerics live behind that boundary.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "posdefkit/posdefkit.h"

namespace {

const std::vector<std::string> kCommands = {
    "check-pd", "gmsc-ensemble", "gmsc-path",     "rotation",        "build-seq", "estimate",
    "atoms",    "realify",       "tilings-verify", "demo-eigenvalue", "demo-product"};

int run_text(const std::string& config_text, const std::string& print) {
  pdk_report* report = nullptr;
  const pdk_status status = pdk_run_config(config_text.c_str(), &report);
  if (status != PDK_OK) {
    std::cerr << "error: " << pdk_last_error() << "\n";
    return status == PDK_ERROR_NUMERIC ? 3 : 2;
  }
  if (print == "structured")
    std::cout << pdk_report_structured(report);
  else if (print == "plotdata")
    std::cout << pdk_report_plotdata(report);
  else if (print != "none")
    std::cout << pdk_report_rows(report);
  const int code = pdk_report_exit_code(report);
  pdk_report_free(report);
  return code;
}

int run_file(const std::string& path, const std::string& print,
             const std::string& forced_command) {
  std::ifstream f(path);
  if (!f) {
    std::cerr << "error: cannot read config file " << path << "\n";
    return 2;
  }
  std::stringstream buf;
  buf << f.rdbuf();
  std::string text = buf.str();

  if (!forced_command.empty()) {
    // subcommand form: fill in or cross-check the config's command key
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) {
      std::cerr << "error: config is not valid JSON\n";
      return 2;
    }
    if (doc.contains("command") && doc["command"] != forced_command) {
      std::cerr << "error: config names command \"" << doc["command"].get<std::string>()
                << "\" but the CLI invoked \"" << forced_command << "\"\n";
      return 2;
    }
    doc["command"] = forced_command;
    text = doc.dump();
  }
  return run_text(text, print);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"positive definite functions as correlations: sequence builders, Gaussian "
               "ensembles, and certified estimators"};
  app.require_subcommand(0, 1);

  std::string print_format = "rows";
  app.add_option("--print", print_format, "stdout rendering: rows|structured|plotdata|none")
      ->capture_default_str();

  bool show_version = false;
  app.add_flag("--version", show_version, "print the library version");

  std::string run_path;
  CLI::App* run = app.add_subcommand("run", "execute the command named inside a config file");
  run->add_option("config", run_path, "JSON config file")->required();
  run->fallthrough();

  std::vector<std::pair<CLI::App*, std::string>> command_subs;
  std::vector<std::string> command_paths(kCommands.size());
  for (std::size_t i = 0; i < kCommands.size(); ++i) {
    CLI::App* sub =
        app.add_subcommand(kCommands[i], "run a config through the " + kCommands[i] + " command");
    sub->add_option("config", command_paths[i], "JSON config file")->required();
    sub->fallthrough();
    command_subs.emplace_back(sub, kCommands[i]);
  }

  CLI11_PARSE(app, argc, argv);

  if (show_version) {
    std::cout << pdk_version() << "\n";
    return 0;
  }
  if (run->parsed()) return run_file(run_path, print_format, "");
  for (std::size_t i = 0; i < command_subs.size(); ++i)
    if (command_subs[i].first->parsed())
      return run_file(command_paths[i], print_format, command_subs[i].second);

  std::cout << app.help();
  return 0;
}
