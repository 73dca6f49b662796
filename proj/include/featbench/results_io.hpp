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
#include <fstream>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "featbench/campaign_types.hpp"

namespace featbench {

// Results file: append-only CSV, one line per campaign.
inline constexpr const char* kResultsCsvHeader =
    "program,fuzzer,trial,seed,completed,runtime_s,executions";

std::string result_to_csv_line(const CampaignResult& r);
CampaignResult result_from_csv_line(const std::string& line);

// Loads a results file; tolerates a missing file (empty set), rejects a
// wrong header.
std::vector<CampaignResult> load_results_csv(const std::filesystem::path& p);

// Serialized appender used by the campaign matrix: every line is flushed so
// an interrupted run can resume from the file.
class ResultsAppender {
 public:
  explicit ResultsAppender(const std::filesystem::path& p);
  void append(const CampaignResult& r);

 private:
  std::mutex mu_;
  std::ofstream out_;
};

// Validation file: `name,analytic_p,mc_estimate,witness_ok`.
struct ValidationRow {
  std::string name;
  std::optional<double> analytic_p;
  std::optional<double> mc_estimate;
  bool witness_ok = false;
};

inline constexpr const char* kValidationCsvHeader =
    "name,analytic_p,mc_estimate,witness_ok";

std::string validation_to_csv(std::span<const ValidationRow> rows);
std::vector<ValidationRow> validation_from_csv(const std::string& text);

}  // namespace featbench
