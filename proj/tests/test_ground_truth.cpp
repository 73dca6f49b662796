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

#include <algorithm>
#include <cmath>
#include <map>

#include "featbench/ground_truth.hpp"
#include "featbench/runner.hpp"
#include "featbench/target_layout.hpp"
#include "test_util.hpp"

using namespace featbench;

namespace {

// Independent oracle for the binomial upper tail: probability-vector
// convolution, one Bernoulli trial at a time.
Rational dp_binomial_tail(uint32_t n, uint32_t k, uint64_t num, uint64_t den) {
  Rational p(num, den);
  Rational q = 1 - p;
  std::vector<Rational> dist{1};  // dist[j] = P[j successes so far]
  for (uint32_t trial = 0; trial < n; ++trial) {
    std::vector<Rational> next(dist.size() + 1);
    for (size_t j = 0; j < dist.size(); ++j) {
      next[j] += dist[j] * q;
      next[j + 1] += dist[j] * p;
    }
    dist = std::move(next);
  }
  Rational tail = 0;
  for (size_t j = k; j < dist.size(); ++j) tail += dist[j];
  return tail;
}

}  // namespace

TEST_CASE("analytic probabilities: closed forms") {
  CHECK(*analytic_probability(parse_name("COMP_W2_D2_O2_B1")) ==
        Rational(1, 4));
  CHECK(*analytic_probability(parse_name("COMP_W2_D4_O4_B3")) ==
        Rational(1, 256));
  CHECK(*analytic_probability(parse_name("COMWE_W3_D3_O8_B1")) ==
        Rational(1, 512));
  CHECK(*analytic_probability(parse_name("DMAG_S4_L1")) == Rational(1, 256));
  CHECK(*analytic_probability(parse_name("DMAG_S4_L2")) ==
        Rational(1, 65536));
  CHECK(*analytic_probability(parse_name("DCHK_C1")) == Rational(1, 65536));
  CHECK(*analytic_probability(parse_name("DCHK_C2")) ==
        Rational(1, 4294967296ull));
  // nested: (depth-count) two-byte magic levels times count checksum levels
  CHECK(*analytic_probability(parse_name("DNST_D1_C0")) ==
        Rational(1, 65536));
  CHECK(*analytic_probability(parse_name("DNST_D3_C1")) ==
        Rational(1, 281474976710656ull));  // 2^-48
}

TEST_CASE("analytic probabilities: loops") {
  // feasible length: certainty; infeasible: zero
  CHECK(*analytic_probability(parse_name("COML_I4_DC0")) == Rational(1));
  auto infeasible = ProgramSpec::make_with_len(
      FeatureFamily::kLoop, LoopParams{LoopParams::Kind::kLoop, 5, false}, 4);
  CHECK(*analytic_probability(infeasible) == Rational(0));

  // constrained loop: P[X >= 1] = 1 - (255/256)^64
  auto spec = parse_name("COML_I1_DC1");
  Rational p = *analytic_probability(spec);
  Rational q255(255, 256);
  Rational pow = 1;
  for (int i = 0; i < 64; ++i) pow *= q255;
  CHECK(p == 1 - pow);
}

TEST_CASE("binomial tail formula matches the convolution oracle") {
  for (uint32_t k : {0u, 1u, 2u, 3u, 4u, 5u}) {
    CAPTURE(k);
    CHECK(binomial_tail_at_least(64, k, 1, 256) ==
          dp_binomial_tail(64, k, 1, 256));
  }
  CHECK(binomial_tail_at_least(10, 3, 1, 2) == dp_binomial_tail(10, 3, 1, 2));
  CHECK(binomial_tail_at_least(5, 6, 1, 2) == Rational(0));  // k > n
  CHECK(binomial_tail_at_least(5, 0, 1, 2) == Rational(1));
  CHECK(binomial_tail_at_least(1, 1, 1, 256) == Rational(1, 256));
}

TEST_CASE("analytic probability is monotone along difficulty ladders") {
  auto grid = default_grid();
  std::map<std::string, Rational> by_name;
  for (const auto& spec : grid)
    by_name[spec.name()] = *analytic_probability(spec);

  for (const auto& sweep : default_sweeps()) {
    bool expect_monotone =
        sweep.parameter == Parameter::kDepth ||
        sweep.parameter == Parameter::kWeight ||
        sweep.parameter == Parameter::kMagicLength ||
        sweep.parameter == Parameter::kChecksumCount ||
        sweep.parameter == Parameter::kNestDepth;
    if (!expect_monotone) continue;
    for (size_t i = 1; i < sweep.programs.size(); ++i) {
      CAPTURE(sweep.programs[i]);
      CHECK(by_name.at(sweep.programs[i]) <= by_name.at(sweep.programs[i - 1]));
    }
  }

  // Constrained-loop iteration ladder, at fixed input length.
  Rational last = 1;
  for (uint32_t iter : {1u, 2u, 4u, 8u}) {
    auto spec = ProgramSpec::make(
        FeatureFamily::kLoopDataConstraint,
        LoopParams{LoopParams::Kind::kLoop, iter, true});
    Rational p = *analytic_probability(spec);
    CHECK(p <= last);
    last = p;
  }
}

TEST_CASE("probabilities live in (0, 1] across the grid") {
  for (const auto& spec : default_grid()) {
    auto p = analytic_probability(spec);
    REQUIRE(p.has_value());
    CHECK(*p > 0);  // the default grid excludes infeasible specs
    CHECK(*p <= 1);
  }
}

TEST_CASE("witness construction per family") {
  CHECK(witness_input(parse_name("DMAG_S0_L4")).size() == 64);
  // magic witness: magic bytes at the region, zero elsewhere
  auto spec = parse_name("DMAG_S4_L2");
  auto w = witness_input(spec);
  CHECK(w[0] == 0);
  CHECK(w[3] == 0);
  CHECK(w[4] != 0);

  // loop witnesses
  auto loop_w = witness_input(parse_name("COML_I3_DC1"));
  CHECK(std::count(loop_w.begin(), loop_w.end(), kLoopSentinel) == 3);
  auto plain_w = witness_input(parse_name("COML_I3_DC0"));
  CHECK(plain_w.size() == 64);

  // infeasible loop: no witness, reported loudly
  auto infeasible = ProgramSpec::make_with_len(
      FeatureFamily::kLoop, LoopParams{LoopParams::Kind::kLoop, 5, false}, 4);
  CHECK_THROWS_AS(witness_input(infeasible), NoWitness);
  CHECK(trigger_profile(infeasible).witness.empty());
}

TEST_CASE("witnesses trigger the planted bug across a family sample") {
  testutil::TempDir dir("wit");
  for (const char* name :
       {"COMP_W2_D4_O4_B13", "COMWE_W3_D2_O6_B1", "COML_I8_DC0",
        "COMR_I4_DC1", "DMAG_S8_L6", "DCHK_C3", "DNST_D4_C2"}) {
    auto spec = parse_name(name);
    auto bin = testutil::compile_spec(spec, dir.path);
    auto witness = witness_input(spec);
    REQUIRE(witness.size() == spec.input_len);
    auto result = exec_target(bin, witness);
    CAPTURE(name);
    CHECK(result.aborted());
    CHECK(confirms_bug(result, bug_marker_for(spec.name())));
  }
}

TEST_CASE("branch-tree witness search is deterministic") {
  auto spec = parse_name("COMP_W2_D4_O4_B13");
  CHECK(witness_input(spec) == witness_input(spec));
}

TEST_CASE("monte carlo estimates match analytic probabilities") {
  testutil::TempDir dir("mc");
  auto spec = parse_name("COMP_W2_D2_O2_B1");
  auto bin = testutil::compile_spec(spec, dir.path);

  auto est = monte_carlo_probability(spec, bin, 40000, 12345);
  CHECK(est.trials == 40000);
  double analytic = 0.25;
  CHECK(std::fabs(est.estimate - analytic) < 3.0 * est.std_error);

  // deterministic given the seed
  auto again = monte_carlo_probability(spec, bin, 40000, 12345);
  CHECK(again.hits == est.hits);
  auto other_seed = monte_carlo_probability(spec, bin, 40000, 777);
  CHECK(std::fabs(other_seed.estimate - analytic) < 3.0 * other_seed.std_error);
}

TEST_CASE("monte carlo argument validation") {
  testutil::TempDir dir("mc_err");
  auto spec = parse_name("COMP_W2_D2_O2_B1");
  CHECK_THROWS_AS(
      monte_carlo_probability(spec, dir.path / "missing", 10, 1),
      TargetMissing);
  auto bin = testutil::compile_spec(spec, dir.path);
  CHECK_THROWS_AS(monte_carlo_probability(spec, bin, 0, 1), Error);
}

TEST_CASE("trigger_profile bundles probability and witness") {
  auto profile = trigger_profile(parse_name("DMAG_S0_L1"));
  REQUIRE(profile.probability.has_value());
  CHECK(*profile.probability == Rational(1, 256));
  CHECK(profile.witness.size() == 64);
}

TEST_CASE("monte carlo matches analytic beyond the tree families") {
  testutil::TempDir dir("mc_more");
  struct Case { const char* name; uint64_t trials; };
  // families and weights not exercised by the probability-law sub-grid
  const Case cases[] = {
      {"COMP_W2_D3_O3_B1", 200000},   // 1/27
      {"COMWE_W2_D2_O6_B1", 200000},  // 1/36
      {"COML_I2_DC1", 200000},        // binomial tail ~2.5e-2
      {"COMR_I1_DC1", 100000},        // binomial tail ~0.22
  };
  for (const auto& c : cases) {
    auto spec = parse_name(c.name);
    auto bin = testutil::compile_spec(spec, dir.path);
    double p = static_cast<double>(*analytic_probability(spec));
    auto est = monte_carlo_probability(spec, bin, c.trials, 31337);
    double se = std::sqrt(p * (1.0 - p) / static_cast<double>(c.trials));
    CAPTURE(c.name);
    CHECK(std::fabs(est.estimate - p) < 3.0 * se);
  }
}
