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

#include "featbench/results_io.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "featbench/errors.hpp"

namespace featbench {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  size_t pos = 0;
  while (true) {
    size_t next = line.find(',', pos);
    if (next == std::string::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
}

template <typename T>
T parse_num(const std::string& s, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw Error(std::string("results CSV: bad ") + what + " '" + s + "'");
  return value;
}

bool parse_bool(const std::string& s, const char* what) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw Error(std::string("results CSV: bad ") + what + " '" + s + "'");
}

}  // namespace

std::string result_to_csv_line(const CampaignResult& r) {
  std::string execs = r.executions ? std::to_string(*r.executions) : "";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%s,%u,%llu,%s,%.6f,%s", r.program.c_str(),
                r.fuzzer.c_str(), r.trial,
                static_cast<unsigned long long>(r.seed),
                r.completed ? "true" : "false", r.runtime_s, execs.c_str());
  return buf;
}

CampaignResult result_from_csv_line(const std::string& line) {
  auto fields = split_csv(line);
  if (fields.size() != 7)
    throw Error("results CSV: expected 7 fields, got " +
                std::to_string(fields.size()));
  CampaignResult r;
  r.program = fields[0];
  r.fuzzer = fields[1];
  r.trial = parse_num<uint32_t>(fields[2], "trial");
  r.seed = parse_num<uint64_t>(fields[3], "seed");
  r.completed = parse_bool(fields[4], "completed flag");
  r.runtime_s = std::stod(fields[5]);
  if (!fields[6].empty())
    r.executions = parse_num<uint64_t>(fields[6], "executions");
  return r;
}

std::vector<CampaignResult> load_results_csv(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) return {};
  std::string line;
  if (!std::getline(in, line)) return {};
  if (line != kResultsCsvHeader)
    throw Error("results CSV " + p.string() + ": unexpected header");
  std::vector<CampaignResult> results;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    results.push_back(result_from_csv_line(line));
  }
  return results;
}

ResultsAppender::ResultsAppender(const std::filesystem::path& p) {
  bool fresh = !std::filesystem::exists(p) ||
               std::filesystem::file_size(p) == 0;
  out_.open(p, std::ios::app);
  if (!out_) throw Error("cannot open results file " + p.string());
  if (fresh) out_ << kResultsCsvHeader << "\n" << std::flush;
}

void ResultsAppender::append(const CampaignResult& r) {
  std::lock_guard<std::mutex> lock(mu_);
  out_ << result_to_csv_line(r) << "\n" << std::flush;
}

std::string validation_to_csv(std::span<const ValidationRow> rows) {
  std::ostringstream os;
  os << kValidationCsvHeader << "\n";
  for (const auto& row : rows) {
    os << row.name << ",";
    char buf[64];
    if (row.analytic_p) {
      std::snprintf(buf, sizeof buf, "%.12g", *row.analytic_p);
      os << buf;
    }
    os << ",";
    if (row.mc_estimate) {
      std::snprintf(buf, sizeof buf, "%.12g", *row.mc_estimate);
      os << buf;
    }
    os << "," << (row.witness_ok ? "true" : "false") << "\n";
  }
  return os.str();
}

std::vector<ValidationRow> validation_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kValidationCsvHeader)
    throw Error("validation CSV: unexpected header");
  std::vector<ValidationRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != 4) throw Error("validation CSV: expected 4 fields");
    ValidationRow row;
    row.name = fields[0];
    if (!fields[1].empty()) row.analytic_p = std::stod(fields[1]);
    if (!fields[2].empty()) row.mc_estimate = std::stod(fields[2]);
    row.witness_ok = parse_bool(fields[3], "witness_ok");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace featbench
