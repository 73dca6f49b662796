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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "featbench/campaign_types.hpp"
#include "featbench/feature_model.hpp"

namespace featbench {

// 1-based average (fractional) ranks; ties share the mean of their ranks.
std::vector<double> average_ranks(std::span<const double> values);

enum class PValueMethod {
  kTTest,        // two-tailed t approximation, df = n - 2
  kPermutation,  // exact for n <= 8, seeded random permutations above
};

struct SpearmanResult {
  double rho = 0.0;
  double p_value = 1.0;
};

// Spearman rank correlation with average ranks for ties. |rho| = 1 yields
// p = 0. Throws LengthMismatch (|xs| != |ys| or n < 2) and DegenerateInput
// (all xs equal or all ys equal).
SpearmanResult spearman(std::span<const double> xs, std::span<const double> ys,
                        PValueMethod method = PValueMethod::kTTest,
                        uint64_t permutation_seed = 1);

// Fraction of results with completed = true. Throws EmptyInput.
double completion_rate(std::span<const CampaignResult> results);

// One report cell-group: correlation of a parameter sweep against runtime
// plus the completion rate over the sweep's runs.
struct StatRow {
  std::string fuzzer;
  std::string parameter;             // e.g. "COMD"
  std::optional<double> rho;         // nullopt renders as "-"
  std::optional<double> p_value;
  bool significant = false;          // p < 0.05
  double completion = 0.0;
  int n_points = 0;                  // completed runs feeding the correlation
};

enum class TrialAggregate {
  kNone,    // correlate per-trial points
  kMedian,  // median completed runtime per program
};

// xs = the sweep's parameter values, ys = runtime of completed runs only.
// rho/p become unavailable with fewer than 5 completed points or fewer than
// 2 distinct parameter values; completion is over all of the sweep's runs.
// Throws UnknownSweep if the resultset has no runs for the sweep.
StatRow correlate_parameter(std::span<const CampaignResult> results,
                            const std::string& fuzzer,
                            const SweepAnnotation& sweep,
                            TrialAggregate aggregate = TrialAggregate::kNone,
                            PValueMethod method = PValueMethod::kTTest);

// Table-style report: one row per fuzzer, a corr/comp column pair per
// parameter. rho prints to 3 decimals with a trailing '*' when significant,
// completion to 2 decimals, '-' where unavailable.
std::string render_table_markdown(std::span<const StatRow> rows);
std::string render_table_csv(std::span<const StatRow> rows);

}  // namespace featbench
