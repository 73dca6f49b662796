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

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "featbench/campaign_types.hpp"
#include "featbench/codegen.hpp"

namespace featbench {

// How to launch one fuzzer and detect the planted bug. Built-in fuzzers use
// the reserved "builtin:<name> {target}" command form.
struct FuzzerAdapter {
  enum class CrashProbe {
    kSignalExit,  // watch the spawned wrapper; crash_input appears on exit
    kCrashDir,    // poll a directory glob for the first crash file
  };

  std::string name;
  std::string command_template;  // {target} {corpus_in} {out_dir} {timeout_s}
  CrashProbe crash_probe = CrashProbe::kSignalExit;
  std::string crash_glob;  // kCrashDir: glob relative to {out_dir}
  std::vector<std::string> env;  // KEY=VALUE pairs

  bool is_builtin() const {
    return command_template.rfind("builtin:", 0) == 0;
  }
};

// Validates the adapter contract (a {target} placeholder, a glob for
// crash-dir probes, well-formed env entries).
void validate_adapter(const FuzzerAdapter& adapter);

// The two zero-install fuzzers: "random" and "marker".
std::vector<FuzzerAdapter> builtin_adapters();

// Adapter definitions from a TOML or JSON file (picked by extension).
std::vector<FuzzerAdapter> load_adapters(const std::filesystem::path& path);

// What a campaign needs to know about one built target.
struct TargetRuntime {
  std::string name;
  std::filesystem::path binary;
  uint32_t input_len = 0;
  std::string bug_marker;
};

// Deterministic executions-per-second floor used to turn a wall-clock
// timeout into the built-in fuzzers' execution budget. Conservative on
// purpose: the budget, not the clock, is what normally ends a campaign, so
// completion flags are reproducible.
inline constexpr uint64_t kBuiltinExecsPerSecond = 500;

// Grace between SIGTERM at the timeout and SIGKILL of the process group.
inline constexpr double kKillGraceSeconds = 2.0;

struct CampaignOptions {
  double timeout_s = 300.0;
  uint64_t exec_budget = 0;  // 0: timeout_s * kBuiltinExecsPerSecond
  std::filesystem::path scratch_dir;  // campaign-private work directory
};

// One fuzzer x target x trial run: spawns the fuzzer, waits for a confirmed
// bug (the crashing input must reproduce SIGABRT and print the target's
// marker), and enforces the timeout on the whole process group. Crash
// reports that do not reproduce the planted bug are discarded.
CampaignResult run_campaign(const TargetRuntime& target,
                            const FuzzerAdapter& adapter,
                            const CampaignOptions& options, uint32_t trial,
                            uint64_t seed);

struct MatrixOptions {
  double timeout_s = 300.0;
  uint64_t exec_budget = 0;
  uint32_t trials = 3;
  int jobs = 1;
  uint64_t master_seed = 1;
  bool resume = false;
  std::filesystem::path out_dir;
};

// Every program x fuzzer x trial cell; results stream to the append-only
// CSV as they finish, and cells already present in it are skipped when
// resuming. Per-cell failures are reported on stderr and retried on the
// next resume. Returns all results sorted by (program, fuzzer, trial).
std::vector<CampaignResult> run_matrix(std::span<const TargetRuntime> targets,
                                       std::span<const FuzzerAdapter> fuzzers,
                                       const MatrixOptions& options,
                                       const std::filesystem::path& results_csv);

}  // namespace featbench
