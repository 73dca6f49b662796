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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "featbench/toml_lite.hpp"

namespace featbench {

// Resolved settings for a pipeline invocation. Values come from the TOML
// config file, overridden by command-line flags; the resolved copy is
// serialized into the output directory for provenance.
struct PipelineConfig {
  std::string grid = "default";  // "default" or a grid manifest path
  std::filesystem::path output_root = "out";
  std::filesystem::path adapters_file;        // optional
  std::vector<std::string> fuzzers = {"random"};
  double timeout_s = 300.0;
  uint32_t trials = 3;
  int jobs = 1;
  uint64_t exec_budget = 0;  // built-ins; 0 derives it from the timeout
  bool resume = false;

  uint64_t master_seed = 1;
  uint64_t mc_seed = 7;
  uint64_t mc_trials = 100000;

  std::string aggregate = "none";  // analyze: "none" | "median"
  std::string p_method = "t";      // analyze: "t" | "permutation"

  static PipelineConfig from_toml_file(const std::filesystem::path& path);
  void apply(const toml_lite::Table& table);
  std::string to_toml() const;

  // Sanity-checks values and referenced paths; throws ConfigError.
  void validate_paths(bool grid_must_exist) const;
};

}  // namespace featbench
