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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "featbench/feature_model.hpp"

namespace featbench {

// One emitted benchmark target: C99 source with a single planted fault
// (abort() behind the feature's guards), branch markers, and a uniform
// input harness. Emission is a pure function of the spec.
struct SourceUnit {
  ProgramSpec spec;
  std::string code;
  std::string bug_marker;    // line printed on stderr right before abort()
  std::string entry_symbol;  // the check function is named after the program
};

// Marker line printed to stderr immediately before the planted fault.
std::string bug_marker_for(const std::string& program_name);

// Per-family emitters. Each validates the family precondition.
SourceUnit emit_branch_tree(const ProgramSpec& spec);
SourceUnit emit_loop(const ProgramSpec& spec);
SourceUnit emit_magic(const ProgramSpec& spec);
SourceUnit emit_checksum(const ProgramSpec& spec);
SourceUnit emit_nested(const ProgramSpec& spec);

// Dispatch on the spec's family.
SourceUnit emit_source(const ProgramSpec& spec);

// Reference model of a branch-tree target's routing: the 1-based leaf an
// input hash reaches. Level k consumes digit k of the hash in base
// weight*(width-1); digits below width-1 follow the edge toward the buggy
// leaf, the rest pick one of the remaining children uniformly.
uint32_t route_leaf(const BranchTreeParams& p, uint32_t hash);

// Child indices along the path from the root to 1-based leaf `bug_branch`.
std::vector<uint32_t> bug_path_digits(const BranchTreeParams& p);

struct EmitError {
  std::string program;
  std::string message;
};

struct EmitReport {
  std::vector<std::string> written;  // program names, grid order
  std::vector<EmitError> errors;
  std::filesystem::path manifest_path;
};

// Emits one source file per spec into out_dir/programs/, plus a POSIX
// build script and a manifest mapping name -> {file, input_len, bug_marker}.
// Per-spec failures are collected, not fatal. Output is byte-deterministic.
EmitReport emit_all(std::span<const ProgramSpec> grid,
                    const std::filesystem::path& out_dir);

// Generation manifest I/O (out_dir/manifest.json).
struct TargetInfo {
  std::string name;
  std::string file;  // source path relative to the bundle root
  uint32_t input_len = 0;
  std::string bug_marker;
};

std::string manifest_to_json(std::span<const TargetInfo> targets);
std::vector<TargetInfo> manifest_from_json(const std::string& text);
std::vector<TargetInfo> load_manifest(const std::filesystem::path& path);

}  // namespace featbench
