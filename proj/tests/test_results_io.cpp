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

#include <random>

#include "featbench/results_io.hpp"
#include "featbench/errors.hpp"
#include "test_util.hpp"

using namespace featbench;

namespace {

CampaignResult sample_result(std::mt19937_64& rng) {
  CampaignResult r;
  r.program = "COMP_W2_D" + std::to_string(1 + rng() % 6) + "_O2_B1";
  r.fuzzer = rng() % 2 ? "random" : "marker";
  r.trial = static_cast<uint32_t>(rng() % 100);
  r.seed = rng();
  r.completed = rng() % 2 == 0;
  r.runtime_s = static_cast<double>(rng() % 100000) / 1000.0;
  if (rng() % 3 != 0) r.executions = rng() % 1000000;
  return r;
}

}  // namespace

TEST_CASE("result lines round-trip") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    CampaignResult r = sample_result(rng);
    CampaignResult back = result_from_csv_line(result_to_csv_line(r));
    CAPTURE(result_to_csv_line(r));
    CHECK(back.program == r.program);
    CHECK(back.fuzzer == r.fuzzer);
    CHECK(back.trial == r.trial);
    CHECK(back.seed == r.seed);
    CHECK(back.completed == r.completed);
    CHECK(back.runtime_s == doctest::Approx(r.runtime_s).epsilon(1e-6));
    CHECK(back.executions == r.executions);
  }
}

TEST_CASE("unknown executions serialize as an empty field") {
  CampaignResult r;
  r.program = "P";
  r.fuzzer = "ext";
  r.runtime_s = 1.0;
  std::string line = result_to_csv_line(r);
  CHECK(line.back() == ',');
  CHECK(!result_from_csv_line(line).executions.has_value());
}

TEST_CASE("appender writes a header once and loads back") {
  testutil::TempDir dir("csv");
  auto path = dir.path / "results.csv";
  std::mt19937_64 rng(7);
  std::vector<CampaignResult> written;
  {
    ResultsAppender appender(path);
    for (int i = 0; i < 5; ++i) {
      auto r = sample_result(rng);
      appender.append(r);
      written.push_back(r);
    }
  }
  {
    ResultsAppender appender(path);  // reopen: no second header
    auto r = sample_result(rng);
    appender.append(r);
    written.push_back(r);
  }
  auto loaded = load_results_csv(path);
  REQUIRE(loaded.size() == written.size());
  for (size_t i = 0; i < loaded.size(); ++i)
    CHECK(loaded[i].program == written[i].program);
}

TEST_CASE("loading rejects a wrong header, tolerates a missing file") {
  testutil::TempDir dir("csvh");
  CHECK(load_results_csv(dir.path / "absent.csv").empty());
  testutil::write_file(dir.path / "bad.csv", "nope,nope\n");
  CHECK_THROWS_AS(load_results_csv(dir.path / "bad.csv"), Error);
}

TEST_CASE("malformed result lines are rejected") {
  CHECK_THROWS_AS(result_from_csv_line("a,b,c"), Error);
  CHECK_THROWS_AS(result_from_csv_line("p,f,x,1,true,1.0,"), Error);
  CHECK_THROWS_AS(result_from_csv_line("p,f,1,1,yes,1.0,"), Error);
}

TEST_CASE("validation CSV round-trips") {
  std::vector<ValidationRow> rows;
  rows.push_back({"COMP_W2_D2_O2_B1", 0.25, 0.2493, true});
  rows.push_back({"DMAG_S4_L8", std::nullopt, std::nullopt, false});
  rows.push_back({"DCHK_C1", 1.0 / 65536, std::nullopt, true});
  std::string text = validation_to_csv(rows);
  auto back = validation_from_csv(text);
  REQUIRE(back.size() == 3);
  CHECK(back[0].name == rows[0].name);
  CHECK(*back[0].analytic_p == doctest::Approx(0.25));
  CHECK(*back[0].mc_estimate == doctest::Approx(0.2493));
  CHECK(back[0].witness_ok);
  CHECK(!back[1].analytic_p.has_value());
  CHECK(!back[1].witness_ok);
  CHECK(!back[2].mc_estimate.has_value());
}
