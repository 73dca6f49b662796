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

#include "featbench/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "featbench/errors.hpp"

namespace featbench {

namespace {

bool all_equal(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(),
                            [](double a, double b) { return a != b; }) ==
         v.end();
}

double pearson_on_ranks(std::span<const double> x, std::span<const double> y) {
  const size_t n = x.size();
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double num = 0, dx = 0, dy = 0;
  for (size_t i = 0; i < n; ++i) {
    num += (x[i] - mx) * (y[i] - my);
    dx += (x[i] - mx) * (x[i] - mx);
    dy += (y[i] - my) * (y[i] - my);
  }
  return num / std::sqrt(dx * dy);
}

double t_test_p_value(double rho, size_t n) {
  if (1.0 - rho * rho <= 0.0) return 0.0;
  double t = rho * std::sqrt((n - 2) / (1.0 - rho * rho));
  boost::math::students_t_distribution<double> dist(
      static_cast<double>(n - 2));
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

double permutation_p_value(std::span<const double> x_ranks,
                           std::vector<double> y_ranks, double rho_obs,
                           uint64_t seed) {
  const double threshold = std::fabs(rho_obs) - 1e-12;
  size_t n = y_ranks.size();
  size_t at_least = 0;
  size_t total = 0;
  if (n <= 8) {
    // Distinct arrangements of the (possibly tied) rank multiset are
    // equally likely under a uniform permutation, so enumerating them
    // once each is exact.
    std::sort(y_ranks.begin(), y_ranks.end());
    do {
      ++total;
      if (std::fabs(pearson_on_ranks(x_ranks, y_ranks)) >= threshold)
        ++at_least;
    } while (std::next_permutation(y_ranks.begin(), y_ranks.end()));
    return static_cast<double>(at_least) / static_cast<double>(total);
  }
  constexpr size_t kShuffles = 10000;
  std::mt19937_64 rng(seed);
  for (size_t i = 0; i < kShuffles; ++i) {
    std::shuffle(y_ranks.begin(), y_ranks.end(), rng);
    if (std::fabs(pearson_on_ranks(x_ranks, y_ranks)) >= threshold)
      ++at_least;
  }
  return static_cast<double>(at_least + 1) /
         static_cast<double>(kShuffles + 1);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share the mean of ranks i+1..j+1
    double rank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

SpearmanResult spearman(std::span<const double> xs, std::span<const double> ys,
                        PValueMethod method, uint64_t permutation_seed) {
  if (xs.size() != ys.size())
    throw LengthMismatch("spearman: xs and ys differ in length");
  if (xs.size() < 2) throw LengthMismatch("spearman: need at least 2 points");
  if (all_equal(xs)) throw DegenerateInput("spearman: all xs equal");
  if (all_equal(ys)) throw DegenerateInput("spearman: all ys equal");

  auto rx = average_ranks(xs);
  auto ry = average_ranks(ys);
  double rho = pearson_on_ranks(rx, ry);
  rho = std::clamp(rho, -1.0, 1.0);

  SpearmanResult result;
  result.rho = rho;
  if (std::fabs(rho) >= 1.0 - 1e-15) {
    result.p_value = 0.0;
  } else if (method == PValueMethod::kTTest) {
    result.p_value = t_test_p_value(rho, xs.size());
  } else {
    result.p_value =
        permutation_p_value(rx, std::move(ry), rho, permutation_seed);
  }
  return result;
}

double completion_rate(std::span<const CampaignResult> results) {
  if (results.empty()) throw EmptyInput("completion_rate: no results");
  size_t done = 0;
  for (const auto& r : results) done += r.completed ? 1 : 0;
  return static_cast<double>(done) / static_cast<double>(results.size());
}

StatRow correlate_parameter(std::span<const CampaignResult> results,
                            const std::string& fuzzer,
                            const SweepAnnotation& sweep,
                            TrialAggregate aggregate, PValueMethod method) {
  std::map<std::string, double> value_of;
  for (size_t i = 0; i < sweep.programs.size(); ++i)
    value_of[sweep.programs[i]] = sweep.values[i];

  std::vector<const CampaignResult*> sweep_runs;
  for (const auto& r : results) {
    if (r.fuzzer == fuzzer && value_of.count(r.program))
      sweep_runs.push_back(&r);
  }
  if (sweep_runs.empty())
    throw UnknownSweep("no " + fuzzer + " runs for sweep " +
                       parameter_code(sweep.parameter));

  StatRow row;
  row.fuzzer = fuzzer;
  row.parameter = parameter_code(sweep.parameter);
  size_t done = 0;
  for (const auto* r : sweep_runs) done += r->completed ? 1 : 0;
  row.completion =
      static_cast<double>(done) / static_cast<double>(sweep_runs.size());

  // Censored (timed out) runs carry no usable runtime; they count toward
  // completion only.
  std::vector<double> xs, ys;
  if (aggregate == TrialAggregate::kMedian) {
    std::map<std::string, std::vector<double>> per_program;
    for (const auto* r : sweep_runs)
      if (r->completed) per_program[r->program].push_back(r->runtime_s);
    for (auto& [program, runtimes] : per_program) {
      xs.push_back(value_of[program]);
      ys.push_back(median(std::move(runtimes)));
    }
  } else {
    for (const auto* r : sweep_runs) {
      if (!r->completed) continue;
      xs.push_back(value_of[r->program]);
      ys.push_back(r->runtime_s);
    }
  }
  row.n_points = static_cast<int>(xs.size());

  std::set<double> distinct(xs.begin(), xs.end());
  if (xs.size() < 5 || distinct.size() < 2) return row;  // unavailable

  try {
    auto res = spearman(xs, ys, method);
    row.rho = res.rho;
    row.p_value = res.p_value;
    row.significant = res.p_value < 0.05;
  } catch (const DegenerateInput&) {
    // all runtimes equal: leave rho unavailable
  }
  return row;
}

namespace {

std::string corr_cell(const StatRow& row) {
  if (!row.rho) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f%s", *row.rho,
                row.significant ? "*" : "");
  return buf;
}

std::string comp_cell(const StatRow& row) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", row.completion);
  return buf;
}

struct TableShape {
  std::vector<std::string> fuzzers;     // first-seen order
  std::vector<std::string> parameters;  // first-seen order
  std::map<std::pair<std::string, std::string>, const StatRow*> cells;
};

TableShape shape_of(std::span<const StatRow> rows) {
  TableShape shape;
  for (const auto& row : rows) {
    if (std::find(shape.fuzzers.begin(), shape.fuzzers.end(), row.fuzzer) ==
        shape.fuzzers.end())
      shape.fuzzers.push_back(row.fuzzer);
    if (std::find(shape.parameters.begin(), shape.parameters.end(),
                  row.parameter) == shape.parameters.end())
      shape.parameters.push_back(row.parameter);
    shape.cells[{row.fuzzer, row.parameter}] = &row;
  }
  return shape;
}

}  // namespace

std::string render_table_markdown(std::span<const StatRow> rows) {
  TableShape shape = shape_of(rows);
  std::ostringstream os;
  os << "| Fuzzer |";
  for (const auto& p : shape.parameters) os << " " << p << " corr | " << p
                                            << " comp |";
  os << "\n|---|";
  for (size_t i = 0; i < shape.parameters.size(); ++i) os << "---|---|";
  os << "\n";
  for (const auto& f : shape.fuzzers) {
    os << "| " << f << " |";
    for (const auto& p : shape.parameters) {
      auto it = shape.cells.find({f, p});
      if (it == shape.cells.end()) {
        os << " - | - |";
      } else {
        os << " " << corr_cell(*it->second) << " | " << comp_cell(*it->second)
           << " |";
      }
    }
    os << "\n";
  }
  return os.str();
}

std::string render_table_csv(std::span<const StatRow> rows) {
  TableShape shape = shape_of(rows);
  std::ostringstream os;
  os << "fuzzer";
  for (const auto& p : shape.parameters)
    os << "," << p << "_corr," << p << "_comp";
  os << "\n";
  for (const auto& f : shape.fuzzers) {
    os << f;
    for (const auto& p : shape.parameters) {
      auto it = shape.cells.find({f, p});
      if (it == shape.cells.end()) {
        os << ",-,-";
      } else {
        os << "," << corr_cell(*it->second) << "," << comp_cell(*it->second);
      }
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace featbench
