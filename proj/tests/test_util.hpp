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

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "featbench/codegen.hpp"
#include "featbench/runner.hpp"

namespace testutil {

inline std::filesystem::path unique_temp_dir(const std::string& tag) {
  static std::atomic<uint64_t> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("featbench_test_" + tag + "_" + std::to_string(getpid()) + "_" +
              std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(dir);
  return dir;
}

struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) : path(unique_temp_dir(tag)) {}
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p,
                       const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::filesystem::path cli_path() {
  const char* p = std::getenv("FEATBENCH_CLI");
  return p ? std::filesystem::path(p) : std::filesystem::path();
}

inline std::filesystem::path src_dir() {
  const char* p = std::getenv("FEATBENCH_SRC_DIR");
  return p ? std::filesystem::path(p) : std::filesystem::path();
}

// Emits and compiles one spec into dir; returns the binary path.
inline std::filesystem::path compile_spec(const featbench::ProgramSpec& spec,
                                          const std::filesystem::path& dir) {
  auto unit = featbench::emit_source(spec);
  auto src = dir / (spec.name() + ".c");
  write_file(src, unit.code);
  auto bin = dir / spec.name();
  auto result = featbench::run_process(
      {featbench::find_c_compiler(), "-std=c99", "-O1", "-o", bin.string(),
       src.string()},
      {}, {}, 120.0);
  if (result.exit_code != 0 || result.signaled)
    throw featbench::Error("test compile failed: " + result.stderr_text);
  return bin;
}

}  // namespace testutil
