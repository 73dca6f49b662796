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
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "featbench/errors.hpp"

namespace featbench {

// The seven program features. The first four shape control flow, the last
// three shape data flow.
enum class FeatureFamily {
  kBranchTree,           // nested conditional branches (width/depth/bbranch)
  kBranchWeight,         // execution probability of the buggy branch
  kLoop,                 // loop / recursion depth, length-driven
  kLoopDataConstraint,   // loop / recursion gated on a sentinel byte
  kMagicBytes,           // verbatim multi-byte constant
  kChecksum,             // computed-value guards
  kNestedMagicChecksum,  // magic and checksum guards stacked
};

constexpr int kFamilyCount = 7;

const char* family_name(FeatureFamily f);
bool is_control_flow(FeatureFamily f);

// Branch trees: a full `width`-ary conditional nest of `depth` levels whose
// w^d leaves are distinct branches. At every level the edge toward the buggy
// leaf is taken with probability 1/weight, so the bug executes with
// probability weight^-depth. `bug_branch` is the 1-based leaf that aborts.
struct BranchTreeParams {
  uint32_t width = 2;
  uint32_t depth = 1;
  uint32_t weight = 2;
  uint32_t bug_branch = 1;

  bool operator==(const BranchTreeParams&) const = default;
};

struct LoopParams {
  enum class Kind { kLoop, kRecursion };

  Kind kind = Kind::kLoop;
  uint32_t iteration = 1;
  bool has_data_constraint = false;

  bool operator==(const LoopParams&) const = default;
};

struct MagicBytesParams {
  uint32_t start = 0;
  uint32_t length = 1;

  bool operator==(const MagicBytesParams&) const = default;
};

struct ChecksumParams {
  uint32_t count = 1;

  bool operator==(const ChecksumParams&) const = default;
};

struct NestedParams {
  uint32_t depth = 1;
  uint32_t count = 0;  // innermost `count` levels are checksum tests

  bool operator==(const NestedParams&) const = default;
};

using FeatureParams = std::variant<BranchTreeParams, LoopParams,
                                   MagicBytesParams, ChecksumParams,
                                   NestedParams>;

// Number of leaves of a full branch tree (width^depth).
// Throws OverflowError above the generation guard of 2^20.
uint64_t leaf_count(const BranchTreeParams& p);

// One benchmark program: a feature family, its parameter record, and the
// number of input bytes the compiled target reads.
struct ProgramSpec {
  FeatureFamily family = FeatureFamily::kBranchTree;
  FeatureParams params = BranchTreeParams{};
  uint32_t input_len = 4;

  bool operator==(const ProgramSpec&) const = default;

  // Canonical spec with the family-default input length; validates.
  static ProgramSpec make(FeatureFamily family, FeatureParams params);
  // Same, but with an explicit input length (still >= the family minimum).
  static ProgramSpec make_with_len(FeatureFamily family, FeatureParams params,
                                   uint32_t input_len);

  std::string name() const;
};

// Smallest input length on which the planted bug can be reachable.
uint32_t min_input_len(FeatureFamily family, const FeatureParams& params);
// Frozen per-family default (64 bytes, or more where the layout needs it;
// branch trees read exactly the 4 hash bytes).
uint32_t default_input_len(FeatureFamily family, const FeatureParams& params);

// Throws InvalidSpec if any family invariant is violated. Note that loop
// specs with iteration > input_len are valid (their bug is unreachable);
// the default grid simply never contains one.
void validate(const ProgramSpec& spec);

// Canonical program name, e.g. "COMP_W2_D2_O2_B1" (omega rendered as "O").
std::string format_name(const ProgramSpec& spec);

// Inverse of format_name; input_len is restored from the family default.
// Throws MalformedName on unknown prefixes, missing fields or out-of-range
// values.
ProgramSpec parse_name(const std::string& name);

// The frozen benchmark grid: exactly 153 programs covering all 7 families.
std::vector<ProgramSpec> default_grid();

// --------------------------------------------------------------------------
// The ten configurable parameters and the grid's sweep annotations.

enum class Parameter {
  kDepth,          // COMD: branch-tree nesting depth
  kWidth,          // COMW: branch-tree branching factor
  kWeight,         // COMWE: execution-probability divisor
  kBugBranch,      // COMB: index of the buggy leaf
  kIteration,      // COMI: loop passes / recursion depth to the bug
  kDataConstraint, // COMDC: loop progress gated on a sentinel byte
  kMagicStart,     // DMAS: byte offset of the magic region
  kMagicLength,    // DMAL: number of magic characters
  kNestDepth,      // DNSD: nesting level of data-flow conditions
  kChecksumCount,  // DCHC: number of checksum tests
};

constexpr int kParameterCount = 10;

const char* parameter_code(Parameter p);
std::optional<Parameter> parameter_from_code(const std::string& code);

// Value of the parameter in a spec, if the spec's family carries it.
std::optional<double> parameter_value(const ProgramSpec& spec, Parameter p);

// Programs in the grid that vary exactly one parameter while everything
// else is held at the sweep's baseline. Feeds the per-parameter correlation.
struct SweepAnnotation {
  Parameter parameter;
  std::vector<std::string> programs;  // grid names, in sweep order
  std::vector<double> values;         // parameter value per program
};

std::vector<SweepAnnotation> default_sweeps();

// --------------------------------------------------------------------------
// Grid manifest (JSON array of {name, family, params, input_len}).

std::string grid_to_json(std::span<const ProgramSpec> grid);
std::vector<ProgramSpec> grid_from_json(const std::string& text);

std::string sweeps_to_json(std::span<const SweepAnnotation> sweeps);
std::vector<SweepAnnotation> sweeps_from_json(const std::string& text);

// Version fingerprint of a grid manifest (FNV-1a 64 of its JSON bytes).
std::string grid_version(std::span<const ProgramSpec> grid);

}  // namespace featbench
