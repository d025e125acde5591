#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "core/dispatch.hpp"

using namespace pdk;

namespace {

Report run(const std::string& text) { return run_config_text(text); }

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("minimal point-mass config") {
    const RunConfig cfg = parse_config(R"({
      "group": "Z",
      "measure": {"components": [{"type": "atom", "theta": [0.0], "weight": 1.0}]},
      "command": "build-seq",
      "seed": 1
    })");
    CHECK(cfg.group == GroupDescriptor::lattice(1));
    REQUIRE(cfg.measure.has_value());
    CHECK(cfg.command == "build-seq");
    CHECK(cfg.seed == 1);
  }

  SUBCASE("weights off by more than 1e-9 name the field") {
    CHECK_THROWS_WITH_AS(parse_config(R"({
      "group": "Z",
      "measure": {"components": [{"type": "atom", "theta": [0.0], "weight": 0.9}]},
      "command": "build-seq", "seed": 1
    })"),
                         doctest::Contains("weights"), invalid_argument);
  }

  SUBCASE("unsupported group") {
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"group": "Q", "command": "build-seq", "seed": 1})"),
        doctest::Contains("unsupported group"), invalid_argument);
  }

  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_WITH_AS(
        parse_config(R"({"group": "Z", "command": "estimate", "extra": 1})"),
        doctest::Contains("unknown key"), invalid_argument);
  }

  SUBCASE("parse errors carry line and column") {
    CHECK_THROWS_WITH_AS(parse_config("{\n  \"group\": \"Z\",\n  oops\n}"),
                         doctest::Contains("line 3"), invalid_argument);
  }

  SUBCASE("seed is required for stochastic commands") {
    CHECK_THROWS_WITH_AS(run(R"({
      "group": "Z", "phi": "delta", "command": "build-seq",
      "params": {"builder": "blocks", "block_lengths": [4, 5]}
    })"),
                         doctest::Contains("seed"), invalid_argument);
  }

  SUBCASE("unknown command and unknown params") {
    CHECK_THROWS_AS(run(R"({"group": "Z", "command": "frobnicate", "seed": 1})"),
                    invalid_argument);
    CHECK_THROWS_WITH_AS(run(R"({
      "group": "Z", "phi": "delta", "command": "check-pd",
      "params": {"windows": [[0, 1]], "bogus": true}
    })"),
                         doctest::Contains("bogus"), invalid_argument);
  }
}

TEST_CASE("check-pd command") {
  SUBCASE("catalog function passes, exit 0") {
    const Report rep = run(R"({
      "group": "Z", "phi": "two_atom_half", "command": "check-pd",
      "params": {"windows": [[0, 1, 2], [0, 2, 5, 9]]}
    })");
    CHECK(rep.exit_code == 0);
    CHECK(rep.doc["results"]["passed"] == true);
  }

  SUBCASE("perturbed table fails with exit 3") {
    const Report rep = run(R"({
      "group": "Z",
      "measure": {"components": [{"type": "atom", "theta": [0.0], "weight": 1.0}]},
      "command": "check-pd",
      "params": {"windows": [[0, 1, 2]]}
    })");
    CHECK(rep.exit_code == 0);  // point mass is positive definite
    // an actually indefinite phi is exercised through the C API and module
    // tests; here the dispatch wiring of the failure path uses tilings-verify
  }
}

TEST_CASE("estimate command emits certificates and plot data") {
  const Report rep = run(R"({
    "group": "Z", "phi": "two_atom_half", "command": "estimate",
    "params": {"sequence": {"builder": "blocks",
                            "block_lengths": [100, 150, 200, 250, 300]},
               "lags": 16, "delta": 0.01},
    "seed": 42
  })");
  CHECK(rep.exit_code == 0);
  CHECK(rep.doc["results"]["lags"].size() == 17);
  // plotdata: header plus one row per lag
  std::size_t lines = 0;
  for (char c : rep.plotdata) lines += c == '\n' ? 1 : 0;
  CHECK(lines == 18);
  for (const auto& row : rep.doc["results"]["lags"]) {
    CHECK(row["radius"].get<double>() > 0.0);
    CHECK(row["heuristic"] == false);
  }
}

TEST_CASE("structured output round-trips and is byte-stable") {
  const std::string cfg = R"({
    "group": "Z", "phi": "delta", "command": "build-seq",
    "params": {"builder": "tiled", "depth": 2, "mode": "practical",
               "k_radii": [1, 2], "min_window": 500},
    "seed": 7
  })";
  const Report a = run(cfg);
  const Report b = run(cfg);
  CHECK(emit_structured(a) == emit_structured(b));
  const nlohmann::json reparsed = nlohmann::json::parse(emit_structured(a));
  CHECK(reparsed == a.doc);
  CHECK(reparsed["schema"] == kReportSchema);
  CHECK(reparsed["version"] == kLibraryVersion);
}

TEST_CASE("every stochastic command is deterministic at the structured level") {
  const std::vector<std::string> configs = {
      R"({"group": "Z", "phi": "two_atom_half", "command": "gmsc-ensemble",
          "params": {"window": 8, "paths": 400, "lags": 4}, "seed": 9})",
      R"({"group": "Z", "phi": "delta", "command": "gmsc-path",
          "params": {"paths": 50, "lag": 0, "folner_n": 300}, "seed": 9})",
      R"({"group": "Z", "phi": "eigenvalue_sqrt2", "command": "rotation",
          "params": {"lags": 3, "orbit_n": 2000}, "seed": 9})",
      R"({"group": "Z", "phi": "two_atom_half", "command": "estimate",
          "params": {"sequence": {"builder": "blocks", "block_lengths": [50, 80, 110]},
                     "lags": 4}, "seed": 9})",
      R"({"group": "Z", "phi": "delta", "command": "atoms",
          "params": {"sequence": {"builder": "blocks", "block_lengths": [50, 80, 110]},
                     "characters": [[0.0], [0.25]]}, "seed": 9})",
      R"({"group": "Z", "phi": "two_atom_half", "command": "realify",
          "params": {"sequence": {"builder": "blocks", "block_lengths": [50, 80, 110]},
                     "lags": 4}, "seed": 9})",
      R"({"group": "Z", "command": "tilings-verify",
          "params": {"sides": [2, 4], "window_lo": [-40], "window_hi": [40]}})",
      R"({"group": "Z", "command": "demo-eigenvalue",
          "params": {"paths": 60, "folner_lengths": [50, 500], "lags": 2}, "seed": 9})",
      R"({"group": "Z", "command": "demo-product",
          "params": {"paths": 500, "lags": 3, "orbit_n": 500, "window": 4}, "seed": 9})",
  };
  for (const auto& cfg : configs) {
    const Report a = run(cfg);
    const Report b = run(cfg);
    CHECK(emit_structured(a) == emit_structured(b));
    CHECK(a.rows.substr(0, a.rows.find("wall_ms")) ==
          b.rows.substr(0, b.rows.find("wall_ms")));
  }
}

TEST_CASE("tilings-verify negative control reports a witness with exit 3") {
  const Report rep = run(R"({
    "group": "Z", "command": "tilings-verify",
    "params": {"sides": [2, 4], "window_lo": [-20], "window_hi": [20],
               "corrupt_level": 2, "corrupt_offset": [1]}
  })");
  CHECK(rep.exit_code == 3);
  CHECK(rep.doc["results"]["passed"] == false);
  CHECK(rep.doc["results"].contains("witness"));
}

TEST_CASE("demo commands assemble their reports") {
  const Report eig = run(R"({
    "group": "Z", "command": "demo-eigenvalue",
    "params": {"paths": 200, "folner_lengths": [100, 2000], "lags": 2}, "seed": 3
  })");
  CHECK(eig.exit_code == 0);
  const auto& spread = eig.doc["results"]["time_average_spread"];
  REQUIRE(spread.size() == 2);
  // ensemble averages settle; single-path time averages do not
  CHECK(spread[1]["across_path_std"].get<double>() > 0.3);

  const Report prod = run(R"({
    "group": "Z", "command": "demo-product",
    "params": {"paths": 4000, "lags": 4, "orbit_n": 2000, "window": 5}, "seed": 4
  })");
  CHECK(prod.exit_code == 0);
  CHECK(prod.doc["results"]["passed"] == true);
}

TEST_CASE("output files are written where the config points") {
  const std::string dir = "test_cli_out";
  std::filesystem::create_directories(dir);
  const Report rep = run(R"({
    "group": "Z", "phi": "delta", "command": "build-seq",
    "params": {"builder": "blocks", "block_lengths": [10, 20]},
    "seed": 5,
    "out": {"structured": "test_cli_out/report.json",
            "values_text": "test_cli_out/values.txt",
            "values_bin": "test_cli_out/values.bin",
            "provenance": "test_cli_out/prov.json"}
  })");
  CHECK(rep.exit_code == 0);
  CHECK(std::filesystem::file_size(dir + "/report.json") > 0);
  CHECK(std::filesystem::file_size(dir + "/values.bin") == 30 * 16);
  const nlohmann::json prov = nlohmann::json::parse(std::ifstream(dir + "/prov.json"));
  CHECK(prov["builder"] == "blocks");
  std::filesystem::remove_all(dir);
}
