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
#include <vector>

namespace featbench {

// Byte fill of the default seed input handed to every fuzzer. Chosen so the
// seed does not sit on any guard: it is not the loop sentinel, it can never
// satisfy a checksum test by itself, and the frozen grid's magic strings do
// not collide with it (asserted by tests over the grid).
inline constexpr uint8_t kSeedFill = 0x55;

std::vector<uint8_t> seed_input(uint32_t input_len);

struct FuzzBudget {
  uint64_t max_execs = 10000;
  double timeout_s = 60.0;  // wall-clock backstop; the exec budget is the
                            // deterministic primary stop
};

struct FuzzOutcome {
  bool found = false;
  uint64_t executions = 0;  // executions until detection, or the full budget
  std::vector<uint8_t> crashing_input;
  double seconds_to_detection = 0.0;  // from fuzzer start
  uint64_t corpus_size = 0;           // marker fuzzer only; never shrinks
};

enum class ExecStrategy {
  kServe,          // persistent-mode target, one roundtrip per input
  kProcessPerExec  // one real process per input
};

// Uniform random inputs of the target's input length; detection on the
// first bug-path execution. Deterministic executions count for a fixed
// seed: the input stream is a pure function of the seed.
FuzzOutcome run_random_fuzzer(const std::filesystem::path& target,
                              uint32_t input_len, const FuzzBudget& budget,
                              uint64_t seed,
                              ExecStrategy strategy = ExecStrategy::kServe);

// Mutational fuzzer with a marker-feedback corpus: every input runs with
// FEATBENCH_TRACE=1 and is retained iff it prints a marker line not seen
// before. Mutators: bit flip, byte replace, splice, and small arithmetic on
// 1/2/4-byte windows. The corpus never shrinks.
FuzzOutcome run_marker_fuzzer(const std::filesystem::path& target,
                              uint32_t input_len, const FuzzBudget& budget,
                              uint64_t seed);

}  // namespace featbench
