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

#include "featbench/config.hpp"

#include <fstream>
#include <sstream>

#include "featbench/errors.hpp"

namespace featbench {

PipelineConfig PipelineConfig::from_toml_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  PipelineConfig config;
  config.apply(toml_lite::parse(ss.str()));
  return config;
}

void PipelineConfig::apply(const toml_lite::Table& table) {
  using namespace toml_lite;
  if (auto v = get_string(table, "grid")) grid = *v;
  if (auto v = get_string(table, "output_root")) output_root = *v;
  if (auto v = get_string(table, "adapters")) adapters_file = *v;
  if (auto v = get_string_array(table, "fuzzers")) fuzzers = *v;
  if (auto v = get_double(table, "timeout_s")) timeout_s = *v;
  if (auto v = get_int(table, "trials")) trials = static_cast<uint32_t>(*v);
  if (auto v = get_int(table, "jobs")) jobs = static_cast<int>(*v);
  if (auto v = get_int(table, "exec_budget"))
    exec_budget = static_cast<uint64_t>(*v);
  if (auto v = get_bool(table, "resume")) resume = *v;
  if (auto v = get_int(table, "seeds.master"))
    master_seed = static_cast<uint64_t>(*v);
  if (auto v = get_int(table, "seeds.mc")) mc_seed = static_cast<uint64_t>(*v);
  if (auto v = get_int(table, "mc_trials"))
    mc_trials = static_cast<uint64_t>(*v);
  if (auto v = get_string(table, "aggregate")) aggregate = *v;
  if (auto v = get_string(table, "p_method")) p_method = *v;
}

std::string PipelineConfig::to_toml() const {
  std::ostringstream os;
  os << "# featbench resolved configuration (written for provenance)\n";
  os << "grid = " << toml_lite::escape_string(grid) << "\n";
  os << "output_root = " << toml_lite::escape_string(output_root.string())
     << "\n";
  if (!adapters_file.empty())
    os << "adapters = " << toml_lite::escape_string(adapters_file.string())
       << "\n";
  os << "fuzzers = [";
  for (size_t i = 0; i < fuzzers.size(); ++i)
    os << (i ? ", " : "") << toml_lite::escape_string(fuzzers[i]);
  os << "]\n";
  os << "timeout_s = " << timeout_s << "\n";
  os << "trials = " << trials << "\n";
  os << "jobs = " << jobs << "\n";
  if (exec_budget) os << "exec_budget = " << exec_budget << "\n";
  os << "resume = " << (resume ? "true" : "false") << "\n";
  os << "mc_trials = " << mc_trials << "\n";
  os << "aggregate = " << toml_lite::escape_string(aggregate) << "\n";
  os << "p_method = " << toml_lite::escape_string(p_method) << "\n";
  os << "\n[seeds]\n";
  os << "master = " << master_seed << "\n";
  os << "mc = " << mc_seed << "\n";
  return os.str();
}

void PipelineConfig::validate_paths(bool grid_must_exist) const {
  if (timeout_s <= 0) throw ConfigError("timeout_s must be positive");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (aggregate != "none" && aggregate != "median")
    throw ConfigError("aggregate must be 'none' or 'median'");
  if (p_method != "t" && p_method != "permutation")
    throw ConfigError("p_method must be 't' or 'permutation'");
  if (grid != "default" && grid_must_exist &&
      !std::filesystem::exists(grid))
    throw ConfigError("grid manifest not found: " + grid);
  if (!adapters_file.empty() && !std::filesystem::exists(adapters_file))
    throw ConfigError("adapter file not found: " + adapters_file.string());
}

}  // namespace featbench
