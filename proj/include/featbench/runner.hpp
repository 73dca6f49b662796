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

#include <sys/types.h>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "featbench/codegen.hpp"
#include "featbench/errors.hpp"

namespace featbench {

struct ExecResult {
  bool signaled = false;
  int term_signal = 0;
  int exit_code = 0;
  bool timed_out = false;
  std::string stdout_text;
  std::string stderr_text;
  double seconds = 0.0;

  bool aborted() const;  // terminated by SIGABRT
};

// Spawn a process in its own process group, feed stdin, capture both output
// streams (bounded), and SIGKILL the group past the deadline.
ExecResult run_process(const std::vector<std::string>& argv,
                       std::span<const uint8_t> stdin_bytes,
                       const std::vector<std::string>& extra_env,
                       double timeout_s, size_t max_capture = 1 << 20);

struct ExecOptions {
  double timeout_s = 10.0;
  bool trace = false;           // set FEATBENCH_TRACE=1
  bool input_via_file = false;  // pass the input as argv[1] instead of stdin
  std::filesystem::path work_dir;  // where temp input files go (file mode)
};

// One real execution of a compiled target on one input.
ExecResult exec_target(const std::filesystem::path& target,
                       std::span<const uint8_t> input,
                       const ExecOptions& opts = {});

// "This is branch N" lines from a trace-mode stdout capture.
std::vector<std::string> marker_lines(const std::string& stdout_text);

// True iff the execution aborted and printed the expected bug marker.
bool confirms_bug(const ExecResult& result, const std::string& bug_marker);

// Client for the targets' persistent mode (FEATBENCH_SERVE=1): one spawned
// process answers many inputs with one status byte each. Batches are written
// whole and then read back, so keep batches under a few thousand inputs.
class ServeSession {
 public:
  explicit ServeSession(const std::filesystem::path& target);
  ~ServeSession();
  ServeSession(const ServeSession&) = delete;
  ServeSession& operator=(const ServeSession&) = delete;

  // `count` fixed-size inputs, back to back in `inputs`; fills `hits`.
  void run_batch(const uint8_t* inputs, size_t input_len, size_t count,
                 uint8_t* hits);
  bool run_one(std::span<const uint8_t> input);

 private:
  void shutdown();

  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
};

// ---------------------------------------------------------------------------
// Target compilation.

// $CC if set, otherwise the first of cc/gcc/clang on PATH.
std::string find_c_compiler();

struct CompileOutcome {
  std::string program;
  bool ok = false;
  std::string diagnostics;
};

struct BuildReport {
  std::vector<CompileOutcome> outcomes;
  int built = 0;
  int failed = 0;
};

// Compiles every manifest entry from bundle_root/<file> into
// bundle_root/bin/<name> with `cc -std=c99 -O1`. Per-target failures are
// recorded and do not stop the batch.
BuildReport build_targets(std::span<const TargetInfo> targets,
                          const std::filesystem::path& bundle_root,
                          int jobs = 1);

std::string build_report_to_json(const BuildReport& report);

}  // namespace featbench
