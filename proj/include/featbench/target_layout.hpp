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

// Frozen facts about the emitted targets' input layout. Generator, oracle
// and documentation all derive from these constants.

namespace featbench {

// Branch trees hash the first four input bytes, little endian.
constexpr uint32_t kHashBytes = 4;

// One checksum test reads a 16-byte data region followed by a 2-byte
// little-endian expected value; the test passes iff the 16-bit wrapping
// byte sum of the region equals the stored value.
constexpr uint32_t kChecksumRegionBytes = 16;
constexpr uint32_t kChecksumValueBytes = 2;
constexpr uint32_t kChecksumTestBytes =
    kChecksumRegionBytes + kChecksumValueBytes;

// Nested magic/checksum programs lay their guards out from this offset;
// each magic level consumes two bytes.
constexpr uint32_t kNestedBaseOffset = 4;
constexpr uint32_t kNestedMagicBytes = 2;

// Data-constrained loops count occurrences of this sentinel byte ('K').
constexpr uint8_t kLoopSentinel = 0x4b;

// Programs read at least this many bytes unless the family needs more
// (branch trees read exactly the hash bytes).
constexpr uint32_t kDefaultInputLen = 64;

// 16-bit wrapping byte sum used by checksum tests.
template <typename It>
uint32_t add16(It first, It last) {
  uint32_t sum = 0;
  for (; first != last; ++first)
    sum = (sum + static_cast<uint8_t>(*first)) & 0xffffu;
  return sum;
}

}  // namespace featbench
