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
#include <optional>
#include <string>

namespace featbench {

// Outcome of one fuzzer x program x trial run. A run that did not complete
// carries the timeout as its runtime (censored).
struct CampaignResult {
  std::string program;
  std::string fuzzer;
  uint32_t trial = 0;
  uint64_t seed = 0;
  bool completed = false;
  double runtime_s = 0.0;
  std::optional<uint64_t> executions;  // unknown for external fuzzers

  bool operator==(const CampaignResult&) const = default;
};

}  // namespace featbench
