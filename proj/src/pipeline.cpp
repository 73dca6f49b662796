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

#include "featbench/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "featbench/campaign.hpp"
#include "featbench/codegen.hpp"
#include "featbench/errors.hpp"
#include "featbench/feature_model.hpp"
#include "featbench/ground_truth.hpp"
#include "featbench/results_io.hpp"
#include "featbench/runner.hpp"
#include "featbench/stats.hpp"

namespace featbench {

namespace {

namespace fs = std::filesystem;

constexpr const char* kToolVersion = "0.1.0";

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw Error("short write to " + path.string());
}

std::vector<ProgramSpec> resolve_grid(const PipelineConfig& config) {
  if (config.grid == "default") return default_grid();
  return grid_from_json(slurp(config.grid));
}

void write_provenance(const PipelineConfig& config) {
  fs::create_directories(config.output_root);
  spit(config.output_root / "featbench.toml", config.to_toml());
}

std::vector<TargetRuntime> targets_from_manifest(const fs::path& root) {
  auto manifest = load_manifest(root / "manifest.json");
  std::vector<TargetRuntime> targets;
  for (const auto& t : manifest) {
    TargetRuntime rt;
    rt.name = t.name;
    rt.binary = root / "bin" / t.name;
    rt.input_len = t.input_len;
    rt.bug_marker = t.bug_marker;
    targets.push_back(std::move(rt));
  }
  return targets;
}

}  // namespace

std::string version_string() {
  auto grid = default_grid();
  return std::string("featbench ") + kToolVersion + " (grid " +
         grid_version(grid) + ", " + std::to_string(grid.size()) +
         " programs)";
}

int cmd_generate(const PipelineConfig& config, std::ostream& out) {
  config.validate_paths(/*grid_must_exist=*/true);
  auto grid = resolve_grid(config);
  write_provenance(config);

  EmitReport report = emit_all(grid, config.output_root);
  spit(config.output_root / "grid.json", grid_to_json(grid));
  if (config.grid == "default")
    spit(config.output_root / "sweeps.json", sweeps_to_json(default_sweeps()));

  out << "generated " << report.written.size() << " of " << grid.size()
      << " programs (grid " << grid_version(grid) << ") in "
      << config.output_root.string() << "\n";
  for (const auto& e : report.errors)
    out << "  ERROR " << e.program << ": " << e.message << "\n";
  return report.errors.empty() ? 0 : 1;
}

int cmd_build(const PipelineConfig& config, std::ostream& out) {
  config.validate_paths(false);
  fs::path root = config.output_root;
  if (!fs::exists(root / "manifest.json"))
    throw ConfigError("no manifest.json in " + root.string() +
                      "; run generate first");
  auto manifest = load_manifest(root / "manifest.json");
  write_provenance(config);
  BuildReport report = build_targets(manifest, root, config.jobs);
  spit(root / "build_report.json", build_report_to_json(report));

  out << "built " << report.built << "/" << manifest.size() << " targets\n";
  for (const auto& o : report.outcomes) {
    if (!o.ok)
      out << "  ERROR " << o.program << ": "
          << (o.diagnostics.empty() ? "compile failed" : o.diagnostics)
          << "\n";
  }
  return report.failed == 0 ? 0 : 1;
}

int cmd_validate(const PipelineConfig& config, std::ostream& out) {
  config.validate_paths(false);
  fs::path root = config.output_root;
  if (!fs::exists(root / "grid.json"))
    throw ConfigError("no grid.json in " + root.string() +
                      "; run generate first");
  auto grid = grid_from_json(slurp(root / "grid.json"));
  write_provenance(config);

  std::vector<ValidationRow> rows(grid.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= grid.size()) return;
      const ProgramSpec& spec = grid[i];
      ValidationRow row;
      row.name = spec.name();
      fs::path binary = root / "bin" / row.name;
      auto p = analytic_probability(spec);
      if (p) row.analytic_p = static_cast<double>(*p);
      try {
        bool feasible = !p || *p > 0;
        if (feasible) {
          auto witness = witness_input(spec);
          ExecOptions opts;
          opts.timeout_s = 10.0;
          ExecResult r = exec_target(binary, witness, opts);
          row.witness_ok = confirms_bug(r, bug_marker_for(row.name));
        } else {
          // Probability-zero specs correctly have no witness.
          row.witness_ok = true;
        }
        if (config.mc_trials > 0) {
          auto mc = monte_carlo_probability(spec, binary, config.mc_trials,
                                            config.mc_seed);
          row.mc_estimate = mc.estimate;
        }
      } catch (const NoWitness&) {
        row.witness_ok = false;  // feasible spec without witness: flag it
      } catch (const Error&) {
        row.witness_ok = false;
      }
      rows[i] = std::move(row);
    }
  };
  int jobs = std::max(1, config.jobs);
  std::vector<std::thread> pool;
  for (int i = 1; i < jobs; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  spit(root / "validation.csv", validation_to_csv(rows));

  size_t ok = std::count_if(rows.begin(), rows.end(),
                            [](const auto& r) { return r.witness_ok; });
  out << "validated " << ok << "/" << rows.size() << " witnesses ("
      << root.string() << "/validation.csv)\n";
  for (const auto& r : rows)
    if (!r.witness_ok) out << "  FLAGGED " << r.name << "\n";
  return ok == rows.size() ? 0 : 1;
}

int cmd_run(const PipelineConfig& config, std::ostream& out) {
  config.validate_paths(false);
  fs::path root = config.output_root;

  std::vector<FuzzerAdapter> available = builtin_adapters();
  if (!config.adapters_file.empty()) {
    auto extra = load_adapters(config.adapters_file);
    available.insert(available.end(), extra.begin(), extra.end());
  }
  std::vector<FuzzerAdapter> selected;
  for (const auto& name : config.fuzzers) {
    auto it = std::find_if(available.begin(), available.end(),
                           [&](const auto& a) { return a.name == name; });
    if (it == available.end())
      throw ConfigError("unknown fuzzer '" + name + "'");
    selected.push_back(*it);
  }
  if (selected.empty()) throw ConfigError("no fuzzers selected");

  if (!fs::exists(root / "manifest.json"))
    throw ConfigError("no manifest.json in " + root.string() +
                      "; run generate first");
  auto targets = targets_from_manifest(root);
  for (const auto& t : targets) {
    if (!fs::exists(t.binary))
      throw ConfigError("target binary missing (run build first): " +
                        t.binary.string());
  }

  MatrixOptions mopts;
  mopts.timeout_s = config.timeout_s;
  mopts.exec_budget = config.exec_budget;
  mopts.trials = config.trials;
  mopts.jobs = config.jobs;
  mopts.master_seed = config.master_seed;
  mopts.resume = config.resume;
  mopts.out_dir = root;
  write_provenance(config);

  auto results = run_matrix(targets, selected, mopts, root / "results.csv");

  size_t expected = targets.size() * selected.size() * config.trials;
  size_t completed = std::count_if(results.begin(), results.end(),
                                   [](const auto& r) { return r.completed; });
  out << "matrix: " << results.size() << "/" << expected << " cells, "
      << completed << " completed (" << root.string() << "/results.csv)\n";
  return results.size() == expected ? 0 : 1;
}

int cmd_analyze(const PipelineConfig& config, std::ostream& out) {
  config.validate_paths(false);
  fs::path root = config.output_root;
  auto results = load_results_csv(root / "results.csv");
  if (results.empty())
    throw EmptyInput("no results in " + (root / "results.csv").string());
  if (!fs::exists(root / "sweeps.json"))
    throw ConfigError("no sweeps.json in " + root.string());
  auto sweeps = sweeps_from_json(slurp(root / "sweeps.json"));
  write_provenance(config);

  std::set<std::string> fuzzer_set;
  for (const auto& r : results) fuzzer_set.insert(r.fuzzer);

  TrialAggregate aggregate = config.aggregate == "median"
                                 ? TrialAggregate::kMedian
                                 : TrialAggregate::kNone;
  PValueMethod method = config.p_method == "permutation"
                            ? PValueMethod::kPermutation
                            : PValueMethod::kTTest;

  std::vector<StatRow> rows;
  for (const auto& fuzzer : fuzzer_set) {
    for (const auto& sweep : sweeps) {
      try {
        rows.push_back(
            correlate_parameter(results, fuzzer, sweep, aggregate, method));
      } catch (const UnknownSweep&) {
        // Missing cells are allowed; the renderer shows hyphens.
      }
    }
  }

  spit(root / "report.md", render_table_markdown(rows));
  spit(root / "report.csv", render_table_csv(rows));
  out << "report: " << rows.size() << " cells over " << fuzzer_set.size()
      << " fuzzer(s) (" << root.string() << "/report.{md,csv})\n";
  return 0;
}

}  // namespace featbench
