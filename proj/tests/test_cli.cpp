// Copyright 2026 The Featbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <string>
#include <vector>

#include "featbench/feature_model.hpp"
#include "featbench/results_io.hpp"
#include "featbench/runner.hpp"
#include "test_util.hpp"

using namespace featbench;

namespace {

ExecResult run_cli(const std::vector<std::string>& args) {
  auto cli = testutil::cli_path();
  REQUIRE(!cli.empty());
  std::vector<std::string> argv{cli.string()};
  argv.insert(argv.end(), args.begin(), args.end());
  return run_process(argv, {}, {}, 600.0);
}

std::string mini_grid_json() {
  std::vector<ProgramSpec> grid = {
      parse_name("COML_I1_DC0"),
      parse_name("COMP_W2_D1_O2_B1"),
      parse_name("DMAG_S0_L1"),
  };
  return grid_to_json(grid);
}

}  // namespace

TEST_CASE("cli end-to-end on a small custom grid") {
  if (testutil::cli_path().empty()) return;
  testutil::TempDir dir("cli");
  testutil::write_file(dir.path / "mini.json", mini_grid_json());
  auto out = (dir.path / "out").string();
  auto grid_flag = (dir.path / "mini.json").string();

  SUBCASE("generate, build, validate, run, analyze") {
    auto gen = run_cli({"generate", "--grid", grid_flag, "--out", out});
    CHECK(gen.exit_code == 0);
    CHECK(std::filesystem::exists(dir.path / "out" / "programs" /
                                  "COML_I1_DC0.c"));
    CHECK(std::filesystem::exists(dir.path / "out" / "manifest.json"));
    CHECK(std::filesystem::exists(dir.path / "out" / "grid.json"));
    CHECK(std::filesystem::exists(dir.path / "out" / "featbench.toml"));

    // regeneration is byte-identical
    auto out2 = (dir.path / "out2").string();
    run_cli({"generate", "--grid", grid_flag, "--out", out2});
    CHECK(testutil::read_file(dir.path / "out" / "manifest.json") ==
          testutil::read_file(dir.path / "out2" / "manifest.json"));
    CHECK(testutil::read_file(dir.path / "out" / "programs" /
                              "DMAG_S0_L1.c") ==
          testutil::read_file(dir.path / "out2" / "programs" /
                              "DMAG_S0_L1.c"));

    auto build = run_cli({"build", "--out", out});
    CHECK(build.exit_code == 0);
    CHECK(std::filesystem::exists(dir.path / "out" / "bin" / "DMAG_S0_L1"));

    auto validate = run_cli({"validate", "--out", out, "--mc-trials", "500"});
    CHECK(validate.exit_code == 0);
    auto rows = validation_from_csv(
        testutil::read_file(dir.path / "out" / "validation.csv"));
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
      CAPTURE(row.name);
      CHECK(row.witness_ok);
      CHECK(row.analytic_p.has_value());
      CHECK(row.mc_estimate.has_value());
    }

    // validation is deterministic for a fixed seed
    auto v1 = testutil::read_file(dir.path / "out" / "validation.csv");
    run_cli({"validate", "--out", out, "--mc-trials", "500"});
    CHECK(testutil::read_file(dir.path / "out" / "validation.csv") == v1);

    // analytic-only mode leaves the estimate column empty
    run_cli({"validate", "--out", out, "--mc-trials", "0"});
    auto analytic_rows = validation_from_csv(
        testutil::read_file(dir.path / "out" / "validation.csv"));
    for (const auto& row : analytic_rows) {
      CHECK(!row.mc_estimate.has_value());
      CHECK(row.witness_ok);
    }

    auto run = run_cli({"run", "--out", out, "--fuzzers", "random",
                        "--trials", "2", "--timeout", "30", "--exec-budget",
                        "20000", "--seed", "3"});
    CHECK(run.exit_code == 0);
    auto results =
        load_results_csv(dir.path / "out" / "results.csv");
    CHECK(results.size() == 3 * 2);
    for (const auto& r : results) CHECK(r.completed);
  }

  SUBCASE("build isolates per-target compile failures") {
    run_cli({"generate", "--grid", grid_flag, "--out", out});
    testutil::write_file(dir.path / "out" / "programs" / "DMAG_S0_L1.c",
                         "this is not C\n");
    auto build = run_cli({"build", "--out", out});
    CHECK(build.exit_code == 1);
    CHECK(std::filesystem::exists(dir.path / "out" / "bin" / "COML_I1_DC0"));
    CHECK(!std::filesystem::exists(dir.path / "out" / "bin" / "DMAG_S0_L1"));
    CHECK(build.stdout_text.find("DMAG_S0_L1") != std::string::npos);

    // regeneration restores the source; the build then succeeds
    run_cli({"generate", "--grid", grid_flag, "--out", out});
    CHECK(run_cli({"build", "--out", out}).exit_code == 0);
  }

  SUBCASE("validate flags a corrupted binary and exits nonzero") {
    run_cli({"generate", "--grid", grid_flag, "--out", out});
    run_cli({"build", "--out", out});
    std::filesystem::copy_file(
        "/bin/true", dir.path / "out" / "bin" / "DMAG_S0_L1",
        std::filesystem::copy_options::overwrite_existing);
    auto validate = run_cli({"validate", "--out", out, "--mc-trials", "0"});
    CHECK(validate.exit_code == 1);
    auto rows = validation_from_csv(
        testutil::read_file(dir.path / "out" / "validation.csv"));
    for (const auto& row : rows) {
      if (row.name == "DMAG_S0_L1") CHECK(!row.witness_ok);
      else CHECK(row.witness_ok);
    }
  }
}

TEST_CASE("cli default grid emits 153 sources") {
  if (testutil::cli_path().empty()) return;
  testutil::TempDir dir("cli153");
  auto out = (dir.path / "out").string();
  auto gen = run_cli({"generate", "--out", out});
  CHECK(gen.exit_code == 0);
  size_t sources = 0;
  for (const auto& entry : std::filesystem::directory_iterator(
           dir.path / "out" / "programs")) {
    if (entry.path().extension() == ".c") ++sources;
  }
  CHECK(sources == 153);
  CHECK(std::filesystem::exists(dir.path / "out" / "sweeps.json"));
}

TEST_CASE("cli analyze renders table semantics from a results file") {
  if (testutil::cli_path().empty()) return;
  testutil::TempDir dir("clian");
  auto out_dir = dir.path / "out";
  std::filesystem::create_directories(out_dir);

  // Depth sweep annotation only.
  auto sweeps = default_sweeps();
  std::vector<SweepAnnotation> depth_only{sweeps[0]};
  testutil::write_file(out_dir / "sweeps.json", sweeps_to_json(depth_only));

  // fuzzer "good": runtime tracks depth exactly; fuzzer "starv": one
  // completed run out of 16.
  std::string csv = std::string(kResultsCsvHeader) + "\n";
  for (int d = 1; d <= 6; ++d) {
    for (int trial = 0; trial < 2; ++trial) {
      csv += "COMP_W2_D" + std::to_string(d) + "_O2_B1,good," +
             std::to_string(trial) + ",1,true," + std::to_string(d * 2.5) +
             ",100\n";
    }
  }
  csv += "COMP_W2_D1_O2_B1,starv,0,1,true,0.5,9\n";
  for (int i = 0; i < 15; ++i) {
    csv += "COMP_W2_D" + std::to_string(1 + i % 6) + "_O2_B1,starv," +
           std::to_string(1 + i) + ",1,false,120.0,\n";
  }
  testutil::write_file(out_dir / "results.csv", csv);

  auto analyze = run_cli({"analyze", "--out", out_dir.string()});
  CHECK(analyze.exit_code == 0);
  auto report = testutil::read_file(out_dir / "report.md");
  CHECK(report.find("| good | 1.000* | 1.00 |") != std::string::npos);
  CHECK(report.find("| starv | - | 0.06 |") != std::string::npos);

  // purity: a second run writes the identical report
  auto report_csv = testutil::read_file(out_dir / "report.csv");
  run_cli({"analyze", "--out", out_dir.string()});
  CHECK(testutil::read_file(out_dir / "report.md") == report);
  CHECK(testutil::read_file(out_dir / "report.csv") == report_csv);
}

TEST_CASE("cli exit codes: 1 for data errors, 2 for config errors") {
  if (testutil::cli_path().empty()) return;
  testutil::TempDir dir("clierr");
  auto out_dir = dir.path / "out";
  std::filesystem::create_directories(out_dir);

  // empty results file: data error
  testutil::write_file(out_dir / "results.csv",
                       std::string(kResultsCsvHeader) + "\n");
  testutil::write_file(out_dir / "sweeps.json", "[]");
  CHECK(run_cli({"analyze", "--out", out_dir.string()}).exit_code == 1);

  // configuration errors
  CHECK(run_cli({"generate", "--grid", "/no/such/grid.json", "--out",
                 (dir.path / "x").string()})
            .exit_code == 2);
  CHECK(run_cli({"build", "--out", (dir.path / "nothing").string()})
            .exit_code == 2);
  CHECK(run_cli({"run", "--out", out_dir.string(), "--fuzzers", "nosuch"})
            .exit_code == 2);
}

TEST_CASE("cli --version reports the grid fingerprint") {
  if (testutil::cli_path().empty()) return;
  auto result = run_cli({"--version"});
  CHECK(result.exit_code == 0);
  CHECK(result.stdout_text.find("featbench") != std::string::npos);
  CHECK(result.stdout_text.find("153 programs") != std::string::npos);
  CHECK(result.stdout_text.find(grid_version(default_grid())) !=
        std::string::npos);
}
