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

#include "featbench/builtin_fuzzers.hpp"

#include <chrono>
#include <cstring>
#include <random>
#include <set>
#include <string>

#include "featbench/errors.hpp"
#include "featbench/runner.hpp"

namespace featbench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void fill_random(std::mt19937_64& rng, uint8_t* out, size_t n) {
  size_t i = 0;
  while (i + 8 <= n) {
    uint64_t word = rng();
    std::memcpy(out + i, &word, 8);
    i += 8;
  }
  while (i < n) out[i++] = static_cast<uint8_t>(rng() & 0xff);
}

}  // namespace

std::vector<uint8_t> seed_input(uint32_t input_len) {
  return std::vector<uint8_t>(input_len, kSeedFill);
}

FuzzOutcome run_random_fuzzer(const std::filesystem::path& target,
                              uint32_t input_len, const FuzzBudget& budget,
                              uint64_t seed, ExecStrategy strategy) {
  FuzzOutcome outcome;
  auto start = Clock::now();
  std::mt19937_64 rng(seed);
  std::vector<uint8_t> input(input_len);

  if (strategy == ExecStrategy::kServe) {
    ServeSession session(target);
    for (uint64_t i = 0; i < budget.max_execs; ++i) {
      fill_random(rng, input.data(), input.size());
      bool hit = session.run_one(input);
      ++outcome.executions;
      if (hit) {
        outcome.found = true;
        outcome.crashing_input = input;
        outcome.seconds_to_detection = seconds_since(start);
        return outcome;
      }
      if ((i & 0xff) == 0xff && seconds_since(start) > budget.timeout_s)
        break;
    }
  } else {
    ExecOptions opts;
    opts.timeout_s = 10.0;
    for (uint64_t i = 0; i < budget.max_execs; ++i) {
      fill_random(rng, input.data(), input.size());
      ExecResult r = exec_target(target, input, opts);
      ++outcome.executions;
      if (r.aborted()) {
        outcome.found = true;
        outcome.crashing_input = input;
        outcome.seconds_to_detection = seconds_since(start);
        return outcome;
      }
      if (seconds_since(start) > budget.timeout_s) break;
    }
  }
  outcome.seconds_to_detection = seconds_since(start);
  return outcome;
}

namespace {

std::vector<uint8_t> mutate(const std::vector<std::vector<uint8_t>>& corpus,
                            size_t pick, std::mt19937_64& rng) {
  std::vector<uint8_t> input = corpus[pick];
  if (input.empty()) return input;
  switch (rng() % 4) {
    case 0: {  // bit flip
      size_t pos = rng() % input.size();
      input[pos] ^= static_cast<uint8_t>(1u << (rng() % 8));
      break;
    }
    case 1: {  // byte replace
      size_t pos = rng() % input.size();
      input[pos] = static_cast<uint8_t>(rng() & 0xff);
      break;
    }
    case 2: {  // splice with another corpus member
      const auto& other = corpus[rng() % corpus.size()];
      if (other.empty()) break;
      size_t cut_a = rng() % (input.size() + 1);
      size_t cut_b = rng() % other.size();
      input.resize(cut_a);
      input.insert(input.end(), other.begin() + cut_b, other.end());
      if (input.empty()) input = corpus[pick];
      break;
    }
    default: {  // +/- arithmetic on a 1/2/4-byte little-endian window
      static constexpr size_t kWidths[] = {1, 2, 4};
      size_t width = kWidths[rng() % 3];
      if (input.size() < width) width = 1;
      size_t pos = rng() % (input.size() - width + 1);
      uint32_t value = 0;
      for (size_t i = 0; i < width; ++i)
        value |= static_cast<uint32_t>(input[pos + i]) << (8 * i);
      int32_t delta = static_cast<int32_t>(rng() % 16) + 1;
      if (rng() & 1) delta = -delta;
      value = static_cast<uint32_t>(static_cast<int64_t>(value) + delta);
      for (size_t i = 0; i < width; ++i)
        input[pos + i] = static_cast<uint8_t>((value >> (8 * i)) & 0xff);
      break;
    }
  }
  return input;
}

}  // namespace

FuzzOutcome run_marker_fuzzer(const std::filesystem::path& target,
                              uint32_t input_len, const FuzzBudget& budget,
                              uint64_t seed) {
  FuzzOutcome outcome;
  auto start = Clock::now();
  std::mt19937_64 rng(seed);

  std::vector<std::vector<uint8_t>> corpus;
  corpus.push_back(seed_input(input_len));
  std::set<std::string> seen_markers;

  ExecOptions opts;
  opts.timeout_s = 10.0;
  opts.trace = true;

  for (uint64_t i = 0; i < budget.max_execs; ++i) {
    std::vector<uint8_t> input;
    if (i == 0) {
      input = corpus[0];  // evaluate the seed itself first
    } else {
      input = mutate(corpus, rng() % corpus.size(), rng);
    }
    ExecResult r = exec_target(target, input, opts);
    ++outcome.executions;
    if (r.aborted()) {
      outcome.found = true;
      outcome.crashing_input = std::move(input);
      outcome.seconds_to_detection = seconds_since(start);
      outcome.corpus_size = corpus.size();
      return outcome;
    }
    bool novel = false;
    for (const auto& line : marker_lines(r.stdout_text)) {
      if (seen_markers.insert(line).second) novel = true;
    }
    if (novel && i > 0) corpus.push_back(std::move(input));
    if (seconds_since(start) > budget.timeout_s) break;
  }
  outcome.seconds_to_detection = seconds_since(start);
  outcome.corpus_size = corpus.size();
  return outcome;
}

}  // namespace featbench
