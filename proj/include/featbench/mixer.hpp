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
#include <string_view>
#include <vector>

namespace featbench {

// 64-bit avalanche mixer (splitmix64 finalizer). This is the project's one
// published mixing function; magic-byte derivation, per-cell seeds and the
// deterministic byte streams below are all defined in terms of it.
constexpr uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  x = x ^ (x >> 31);
  return x;
}

constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr uint64_t kFnvPrime = 0x100000001b3ull;

constexpr uint64_t fnv1a64(std::string_view s, uint64_t h = kFnvOffset) {
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

// Deterministic byte stream: the little-endian bytes of successive
// mix64(seed + 1), mix64(seed + 2), ... values.
class ByteStream {
 public:
  explicit ByteStream(uint64_t seed) : seed_(seed) {}

  uint8_t next() {
    if (have_ == 0) {
      word_ = mix64(seed_ + ++counter_);
      have_ = 8;
    }
    uint8_t b = static_cast<uint8_t>(word_ & 0xff);
    word_ >>= 8;
    --have_;
    return b;
  }

  // Next byte that is neither 0x00 nor 0x0a. Magic strings are drawn from
  // this variant so line- and string-oriented tooling cannot truncate them.
  uint8_t next_text_safe() {
    for (;;) {
      uint8_t b = next();
      if (b != 0x00 && b != 0x0a) return b;
    }
  }

  std::vector<uint8_t> take_text_safe(size_t n) {
    std::vector<uint8_t> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) out.push_back(next_text_safe());
    return out;
  }

 private:
  uint64_t seed_;
  uint64_t counter_ = 0;
  uint64_t word_ = 0;
  int have_ = 0;
};

// Magic bytes for a program are the text-safe stream seeded by the name.
inline std::vector<uint8_t> magic_bytes_for(std::string_view program_name,
                                            size_t length) {
  ByteStream stream(fnv1a64(program_name));
  return stream.take_text_safe(length);
}

// Stable per-cell seed for campaign and Monte-Carlo reproducibility.
inline uint64_t derive_seed(uint64_t master, std::string_view a,
                            std::string_view b = {}, uint64_t n = 0) {
  uint64_t h = mix64(master);
  h = mix64(h ^ fnv1a64(a));
  if (!b.empty()) h = mix64(h ^ fnv1a64(b));
  return mix64(h ^ n);
}

}  // namespace featbench
