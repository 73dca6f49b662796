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

#include <boost/multiprecision/cpp_int.hpp>

#include <filesystem>
#include <optional>
#include <vector>

#include "featbench/feature_model.hpp"

namespace featbench {

using Rational = boost::multiprecision::cpp_rational;

// Exact bug-trigger probability over uniform random inputs of the spec's
// input length. Engaged for every current family; future families without a
// closed form would return nullopt.
std::optional<Rational> analytic_probability(const ProgramSpec& spec);

// Exact upper tail P[Bin(n, num/den) >= k].
Rational binomial_tail_at_least(uint32_t n, uint32_t k, uint64_t num,
                                uint64_t den);

// A concrete input of the spec's length that triggers the planted bug.
// Branch trees are served by a randomized hash search with a frozen seed;
// the other families are constructed directly. Throws NoWitness for
// length-infeasible loop specs.
std::vector<uint8_t> witness_input(const ProgramSpec& spec);

struct MonteCarloEstimate {
  uint64_t trials = 0;
  uint64_t hits = 0;
  double estimate = 0.0;
  double std_error = 0.0;  // binomial standard error
};

// Runs the compiled target (persistent mode) on `trials` uniform random
// inputs of the spec's length. Deterministic given the seed: trials are cut
// into fixed chunks with per-chunk derived seeds, so the hit total does not
// depend on scheduling.
MonteCarloEstimate monte_carlo_probability(
    const ProgramSpec& spec, const std::filesystem::path& target_binary,
    uint64_t trials, uint64_t seed);

struct TriggerProfile {
  ProgramSpec spec;
  std::optional<Rational> probability;
  std::vector<uint8_t> witness;  // empty if NoWitness
};

TriggerProfile trigger_profile(const ProgramSpec& spec);

}  // namespace featbench
