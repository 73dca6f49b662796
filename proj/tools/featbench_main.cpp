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

#include <CLI11.hpp>

#include <functional>
#include <iostream>

#include "featbench/errors.hpp"
#include "featbench/pipeline.hpp"

namespace {

using featbench::PipelineConfig;

// Flags override the config file; only flags the user actually passed are
// applied on top of it.
struct FlagOverrides {
  std::string config_file;
  std::string grid;
  std::string out;
  std::string adapters;
  std::vector<std::string> fuzzers;
  double timeout_s = 0;
  int64_t trials = 0;
  int64_t jobs = 0;
  int64_t exec_budget = 0;
  bool resume = false;
  int64_t seed = 0;
  int64_t mc_trials = -1;
  int64_t mc_seed = 0;
  std::string aggregate;
  std::string p_method;
};

void add_common_flags(CLI::App* cmd, FlagOverrides& flags) {
  cmd->add_option("--config", flags.config_file,
                  "TOML config file (flags override it)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", flags.out, "output directory (default: out)");
  cmd->add_option("--jobs", flags.jobs, "worker threads");
}

PipelineConfig resolve(const CLI::App* cmd, const FlagOverrides& flags) {
  PipelineConfig config;
  if (!flags.config_file.empty())
    config = PipelineConfig::from_toml_file(flags.config_file);
  auto passed = [&](const std::string& name) {
    const CLI::Option* opt = cmd->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (passed("--grid")) config.grid = flags.grid;
  if (passed("--out")) config.output_root = flags.out;
  if (passed("--adapters")) config.adapters_file = flags.adapters;
  if (passed("--fuzzers")) config.fuzzers = flags.fuzzers;
  if (passed("--timeout")) config.timeout_s = flags.timeout_s;
  if (passed("--trials")) config.trials = static_cast<uint32_t>(flags.trials);
  if (passed("--jobs")) config.jobs = static_cast<int>(flags.jobs);
  if (passed("--exec-budget"))
    config.exec_budget = static_cast<uint64_t>(flags.exec_budget);
  if (passed("--resume")) config.resume = flags.resume;
  if (passed("--seed")) config.master_seed = static_cast<uint64_t>(flags.seed);
  if (passed("--mc-trials"))
    config.mc_trials = static_cast<uint64_t>(flags.mc_trials);
  if (passed("--mc-seed")) config.mc_seed = static_cast<uint64_t>(flags.mc_seed);
  if (passed("--aggregate")) config.aggregate = flags.aggregate;
  if (passed("--p-method")) config.p_method = flags.p_method;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"feature-parameterized fuzzing benchmark toolchain"};
  app.require_subcommand(0, 1);

  bool show_version = false;
  app.add_flag("--version", show_version,
               "print version and grid fingerprint");

  FlagOverrides flags;
  std::function<int(const PipelineConfig&)> action;

  auto* generate = app.add_subcommand(
      "generate", "emit benchmark program sources and the manifest");
  add_common_flags(generate, flags);
  generate->add_option("--grid", flags.grid,
                       "'default' or a grid manifest path");
  generate->callback([&]() {
    action = [](const PipelineConfig& c) {
      return featbench::cmd_generate(c, std::cout);
    };
  });

  auto* build = app.add_subcommand("build", "compile the generated targets");
  add_common_flags(build, flags);
  build->callback([&]() {
    action = [](const PipelineConfig& c) {
      return featbench::cmd_build(c, std::cout);
    };
  });

  auto* validate = app.add_subcommand(
      "validate", "check witnesses and probabilities against the targets");
  add_common_flags(validate, flags);
  validate->add_option("--mc-trials", flags.mc_trials,
                       "Monte-Carlo trials per program (0 = analytic only)");
  validate->add_option("--mc-seed", flags.mc_seed, "Monte-Carlo seed");
  validate->callback([&]() {
    action = [](const PipelineConfig& c) {
      return featbench::cmd_validate(c, std::cout);
    };
  });

  auto* run = app.add_subcommand("run", "run the fuzzing campaign matrix");
  add_common_flags(run, flags);
  run->add_option("--fuzzers", flags.fuzzers,
                  "fuzzer names (builtin: random, marker)")
      ->delimiter(',');
  run->add_option("--adapters", flags.adapters,
                  "adapter definitions (TOML or JSON)");
  run->add_option("--timeout", flags.timeout_s, "per-campaign timeout [s]");
  run->add_option("--trials", flags.trials, "trials per program x fuzzer");
  run->add_option("--exec-budget", flags.exec_budget,
                  "execution budget for built-in fuzzers");
  run->add_flag("--resume", flags.resume, "skip cells already in results.csv");
  run->add_option("--seed", flags.seed, "campaign master seed");
  run->callback([&]() {
    action = [](const PipelineConfig& c) {
      return featbench::cmd_run(c, std::cout);
    };
  });

  auto* analyze = app.add_subcommand(
      "analyze", "correlations and completion rates from results.csv");
  add_common_flags(analyze, flags);
  analyze->add_option("--aggregate", flags.aggregate,
                      "'none' or 'median' (per-program trial aggregation)");
  analyze->add_option("--p-method", flags.p_method, "'t' or 'permutation'");
  analyze->callback([&]() {
    action = [](const PipelineConfig& c) {
      return featbench::cmd_analyze(c, std::cout);
    };
  });

  CLI11_PARSE(app, argc, argv);

  if (show_version) {
    std::cout << featbench::version_string() << "\n";
    return 0;
  }
  if (!action) {
    std::cout << app.help();
    return 2;
  }

  try {
    const CLI::App* active = app.get_subcommands().front();
    return action(resolve(active, flags));
  } catch (const featbench::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const featbench::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
