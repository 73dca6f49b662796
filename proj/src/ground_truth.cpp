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

#include "featbench/ground_truth.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "featbench/codegen.hpp"
#include "featbench/mixer.hpp"
#include "featbench/runner.hpp"
#include "featbench/target_layout.hpp"

namespace featbench {

namespace {

using boost::multiprecision::cpp_int;

cpp_int int_pow(uint64_t base, uint32_t exp) {
  cpp_int r = 1;
  for (uint32_t i = 0; i < exp; ++i) r *= base;
  return r;
}

// Frozen seed of the randomized branch-tree witness search.
constexpr uint64_t kWitnessSearchSeed = 0xfeb1bece5ull;

}  // namespace

Rational binomial_tail_at_least(uint32_t n, uint32_t k, uint64_t num,
                                uint64_t den) {
  if (k == 0) return 1;
  if (k > n) return 0;
  // sum_{j=k}^{n} C(n,j) num^j (den-num)^(n-j) / den^n
  cpp_int total = 0;
  cpp_int binom = 1;  // C(n, 0)
  for (uint32_t j = 1; j <= k - 1; ++j) binom = binom * (n - j + 1) / j;
  // binom now C(n, k-1); step it to C(n, j) inside the loop.
  for (uint32_t j = k; j <= n; ++j) {
    binom = binom * (n - j + 1) / j;
    total += binom * int_pow(num, j) * int_pow(den - num, n - j);
  }
  return Rational(total, int_pow(den, n));
}

std::optional<Rational> analytic_probability(const ProgramSpec& spec) {
  validate(spec);
  switch (spec.family) {
    case FeatureFamily::kBranchTree:
    case FeatureFamily::kBranchWeight: {
      const auto& p = std::get<BranchTreeParams>(spec.params);
      return Rational(1, int_pow(p.weight, p.depth));
    }
    case FeatureFamily::kMagicBytes: {
      const auto& p = std::get<MagicBytesParams>(spec.params);
      return Rational(1, int_pow(256, p.length));
    }
    case FeatureFamily::kChecksum: {
      const auto& p = std::get<ChecksumParams>(spec.params);
      return Rational(1, int_pow(65536, p.count));
    }
    case FeatureFamily::kNestedMagicChecksum: {
      const auto& p = std::get<NestedParams>(spec.params);
      cpp_int den = int_pow(256, (p.depth - p.count) * kNestedMagicBytes) *
                    int_pow(65536, p.count);
      return Rational(1, den);
    }
    case FeatureFamily::kLoop: {
      const auto& p = std::get<LoopParams>(spec.params);
      return spec.input_len >= p.iteration ? Rational(1) : Rational(0);
    }
    case FeatureFamily::kLoopDataConstraint: {
      const auto& p = std::get<LoopParams>(spec.params);
      return binomial_tail_at_least(spec.input_len, p.iteration, 1, 256);
    }
  }
  return std::nullopt;
}

std::vector<uint8_t> witness_input(const ProgramSpec& spec) {
  validate(spec);
  std::vector<uint8_t> input(spec.input_len, 0);

  switch (spec.family) {
    case FeatureFamily::kBranchTree:
    case FeatureFamily::kBranchWeight: {
      const auto& p = std::get<BranchTreeParams>(spec.params);
      std::mt19937_64 rng(derive_seed(kWitnessSearchSeed, spec.name()));
      uint32_t hash = 0;
      bool found = false;
      for (uint64_t probe = 0; probe < (1ull << 22); ++probe) {
        uint32_t candidate = static_cast<uint32_t>(rng());
        if (route_leaf(p, candidate) == p.bug_branch) {
          hash = candidate;
          found = true;
          break;
        }
      }
      // Hash 0 routes along the privileged spine to the buggy leaf; the
      // random search only ever misses it for selector spaces far beyond
      // the grid's scale.
      if (!found) hash = 0;
      input[0] = static_cast<uint8_t>(hash & 0xff);
      input[1] = static_cast<uint8_t>((hash >> 8) & 0xff);
      input[2] = static_cast<uint8_t>((hash >> 16) & 0xff);
      input[3] = static_cast<uint8_t>((hash >> 24) & 0xff);
      return input;
    }
    case FeatureFamily::kMagicBytes: {
      const auto& p = std::get<MagicBytesParams>(spec.params);
      auto magic = magic_bytes_for(spec.name(), p.length);
      std::copy(magic.begin(), magic.end(), input.begin() + p.start);
      return input;
    }
    case FeatureFamily::kChecksum: {
      const auto& p = std::get<ChecksumParams>(spec.params);
      ByteStream fill(fnv1a64(spec.name()) ^ 0x77u);
      for (uint32_t j = 0; j < p.count; ++j) {
        uint32_t off = j * kChecksumTestBytes;
        for (uint32_t i = 0; i < kChecksumRegionBytes; ++i)
          input[off + i] = fill.next_text_safe();
        uint32_t sum = add16(input.begin() + off,
                             input.begin() + off + kChecksumRegionBytes);
        input[off + kChecksumRegionBytes] = static_cast<uint8_t>(sum & 0xff);
        input[off + kChecksumRegionBytes + 1] =
            static_cast<uint8_t>((sum >> 8) & 0xff);
      }
      return input;
    }
    case FeatureFamily::kNestedMagicChecksum: {
      const auto& p = std::get<NestedParams>(spec.params);
      uint32_t magic_levels = p.depth - p.count;
      auto magic = magic_bytes_for(spec.name(),
                                   size_t{magic_levels} * kNestedMagicBytes);
      uint32_t off = kNestedBaseOffset;
      std::copy(magic.begin(), magic.end(), input.begin() + off);
      off += magic_levels * kNestedMagicBytes;
      ByteStream fill(fnv1a64(spec.name()) ^ 0x77u);
      for (uint32_t j = 0; j < p.count; ++j) {
        for (uint32_t i = 0; i < kChecksumRegionBytes; ++i)
          input[off + i] = fill.next_text_safe();
        uint32_t sum = add16(input.begin() + off,
                             input.begin() + off + kChecksumRegionBytes);
        input[off + kChecksumRegionBytes] = static_cast<uint8_t>(sum & 0xff);
        input[off + kChecksumRegionBytes + 1] =
            static_cast<uint8_t>((sum >> 8) & 0xff);
        off += kChecksumTestBytes;
      }
      return input;
    }
    case FeatureFamily::kLoop:
    case FeatureFamily::kLoopDataConstraint: {
      const auto& p = std::get<LoopParams>(spec.params);
      if (p.iteration > spec.input_len)
        throw NoWitness(spec.name() + ": no input of length " +
                        std::to_string(spec.input_len) + " reaches iteration " +
                        std::to_string(p.iteration));
      std::fill(input.begin(), input.end(), uint8_t{0x41});
      if (p.has_data_constraint) {
        std::fill_n(input.begin(), p.iteration, kLoopSentinel);
      }
      return input;
    }
  }
  throw Error("unknown feature family");
}

MonteCarloEstimate monte_carlo_probability(
    const ProgramSpec& spec, const std::filesystem::path& target_binary,
    uint64_t trials, uint64_t seed) {
  if (trials < 1) throw Error("monte_carlo_probability: trials must be >= 1");
  validate(spec);

  constexpr uint64_t kChunk = 4096;
  const size_t len = spec.input_len;
  ServeSession session(target_binary);

  std::vector<uint8_t> buffer;
  std::vector<uint8_t> hits_buf;
  uint64_t hits = 0;
  uint64_t done = 0;
  for (uint64_t chunk = 0; done < trials; ++chunk) {
    uint64_t count = std::min(kChunk, trials - done);
    buffer.resize(count * len);
    hits_buf.assign(count, 0);
    // Per-chunk seed: the byte stream is a function of (seed, chunk index)
    // only, so totals do not depend on how chunks are scheduled.
    std::mt19937_64 rng(derive_seed(seed, spec.name(), "mc", chunk));
    size_t i = 0;
    size_t total = buffer.size();
    while (i + 8 <= total) {
      uint64_t word = rng();
      std::memcpy(buffer.data() + i, &word, 8);
      i += 8;
    }
    while (i < total) buffer[i++] = static_cast<uint8_t>(rng() & 0xff);

    session.run_batch(buffer.data(), len, count, hits_buf.data());
    for (uint64_t k = 0; k < count; ++k) hits += hits_buf[k];
    done += count;
  }

  MonteCarloEstimate est;
  est.trials = trials;
  est.hits = hits;
  est.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) /
                            static_cast<double>(trials));
  return est;
}

TriggerProfile trigger_profile(const ProgramSpec& spec) {
  TriggerProfile profile;
  profile.spec = spec;
  profile.probability = analytic_probability(spec);
  try {
    profile.witness = witness_input(spec);
  } catch (const NoWitness&) {
    profile.witness.clear();
  }
  return profile;
}

}  // namespace featbench
