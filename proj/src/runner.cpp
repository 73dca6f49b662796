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

#include "featbench/runner.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

extern char** environ;

namespace featbench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Pipe {
  int fds[2] = {-1, -1};

  Pipe() {
    if (pipe(fds) != 0) throw SpawnFailure("pipe() failed");
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  int read_end() const { return fds[0]; }
  int write_end() const { return fds[1]; }
  void close_read() {
    if (fds[0] >= 0) close(fds[0]);
    fds[0] = -1;
  }
  void close_write() {
    if (fds[1] >= 0) close(fds[1]);
    fds[1] = -1;
  }
};

// argv/envp arrays are assembled before fork so the child only runs
// async-signal-safe calls between fork and execve.
struct ExecImage {
  std::vector<std::string> argv_store;
  std::vector<std::string> envp_store;
  std::vector<char*> argv;
  std::vector<char*> envp;

  ExecImage(const std::vector<std::string>& args,
            const std::vector<std::string>& extra_env) {
    argv_store = args;
    for (char** e = environ; *e != nullptr; ++e) {
      std::string_view entry(*e);
      // Drop any inherited featbench mode switches; callers re-add theirs.
      if (entry.rfind("FEATBENCH_", 0) == 0) continue;
      envp_store.emplace_back(entry);
    }
    for (const auto& kv : extra_env) envp_store.push_back(kv);
    for (auto& s : argv_store) argv.push_back(s.data());
    argv.push_back(nullptr);
    for (auto& s : envp_store) envp.push_back(s.data());
    envp.push_back(nullptr);
  }
};

void read_available(int fd, std::string& sink, size_t cap, bool& eof) {
  char buf[4096];
  ssize_t r = read(fd, buf, sizeof buf);
  if (r > 0) {
    size_t room = sink.size() < cap ? cap - sink.size() : 0;
    sink.append(buf, std::min<size_t>(static_cast<size_t>(r), room));
  } else if (r == 0) {
    eof = true;
  } else if (errno != EINTR && errno != EAGAIN) {
    eof = true;
  }
}

void kill_group(pid_t pid) {
  kill(-pid, SIGKILL);
  kill(pid, SIGKILL);  // in case setpgid lost the race
}

}  // namespace

bool ExecResult::aborted() const { return signaled && term_signal == SIGABRT; }

ExecResult run_process(const std::vector<std::string>& argv,
                       std::span<const uint8_t> stdin_bytes,
                       const std::vector<std::string>& extra_env,
                       double timeout_s, size_t max_capture) {
  if (argv.empty()) throw SpawnFailure("empty argv");
  ExecImage image(argv, extra_env);

  Pipe in_pipe, out_pipe, err_pipe;
  auto start = Clock::now();

  pid_t pid = fork();
  if (pid < 0) throw SpawnFailure("fork() failed");
  if (pid == 0) {
    setpgid(0, 0);
    struct rlimit no_core{0, 0};
    setrlimit(RLIMIT_CORE, &no_core);
    dup2(in_pipe.read_end(), 0);
    dup2(out_pipe.write_end(), 1);
    dup2(err_pipe.write_end(), 2);
    in_pipe.close_read();
    in_pipe.close_write();
    out_pipe.close_read();
    out_pipe.close_write();
    err_pipe.close_read();
    err_pipe.close_write();
    execve(image.argv[0], image.argv.data(), image.envp.data());
    _exit(127);
  }

  in_pipe.close_read();
  out_pipe.close_write();
  err_pipe.close_write();

  // Inputs are tiny relative to the pipe buffer; one shot suffices. The
  // child may abort before reading everything, hence the SIGPIPE guard.
  signal(SIGPIPE, SIG_IGN);
  size_t off = 0;
  while (off < stdin_bytes.size()) {
    ssize_t w = write(in_pipe.write_end(), stdin_bytes.data() + off,
                      stdin_bytes.size() - off);
    if (w < 0) {
      if (errno == EINTR) continue;
      break;  // EPIPE: child is gone or not reading
    }
    off += static_cast<size_t>(w);
  }
  in_pipe.close_write();

  ExecResult result;
  bool out_eof = false, err_eof = false;
  while (!out_eof || !err_eof) {
    double left = timeout_s - seconds_since(start);
    if (left <= 0) {
      result.timed_out = true;
      kill_group(pid);
      break;
    }
    struct pollfd fds[2];
    nfds_t n = 0;
    if (!out_eof) fds[n++] = {out_pipe.read_end(), POLLIN, 0};
    if (!err_eof) fds[n++] = {err_pipe.read_end(), POLLIN, 0};
    int timeout_ms = static_cast<int>(std::min(left, 0.2) * 1000) + 1;
    int rc = poll(fds, n, timeout_ms);
    if (rc < 0 && errno != EINTR) break;
    if (rc <= 0) continue;
    for (nfds_t i = 0; i < n; ++i) {
      if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      if (fds[i].fd == out_pipe.read_end())
        read_available(fds[i].fd, result.stdout_text, max_capture, out_eof);
      else
        read_available(fds[i].fd, result.stderr_text, max_capture, err_eof);
    }
  }

  int status = 0;
  if (waitpid(pid, &status, 0) < 0) throw ExecFailure("waitpid() failed");
  result.seconds = seconds_since(start);
  if (WIFSIGNALED(status)) {
    result.signaled = true;
    result.term_signal = WTERMSIG(status);
  } else if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  }
  return result;
}

ExecResult exec_target(const std::filesystem::path& target,
                       std::span<const uint8_t> input,
                       const ExecOptions& opts) {
  namespace fs = std::filesystem;
  if (!fs::exists(target))
    throw TargetMissing("no such target binary: " + target.string());

  std::vector<std::string> extra_env;
  if (opts.trace) extra_env.push_back("FEATBENCH_TRACE=1");

  if (!opts.input_via_file) {
    return run_process({target.string()}, input, extra_env, opts.timeout_s);
  }

  static std::atomic<uint64_t> counter{0};
  fs::path dir =
      opts.work_dir.empty() ? fs::temp_directory_path() : opts.work_dir;
  fs::create_directories(dir);
  fs::path input_path =
      dir / ("input_" + std::to_string(getpid()) + "_" +
             std::to_string(counter.fetch_add(1)) + ".bin");
  {
    std::ofstream out(input_path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(input.data()),
              static_cast<std::streamsize>(input.size()));
  }
  ExecResult result = run_process({target.string(), input_path.string()}, {},
                                  extra_env, opts.timeout_s);
  std::error_code ec;
  fs::remove(input_path, ec);
  return result;
}

std::vector<std::string> marker_lines(const std::string& stdout_text) {
  std::vector<std::string> lines;
  std::istringstream is(stdout_text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("This is branch ", 0) == 0) lines.push_back(line);
  }
  return lines;
}

bool confirms_bug(const ExecResult& result, const std::string& bug_marker) {
  if (!result.aborted()) return false;
  std::istringstream is(result.stderr_text);
  std::string line;
  while (std::getline(is, line)) {
    if (line == bug_marker) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// ServeSession

ServeSession::ServeSession(const std::filesystem::path& target) {
  if (!std::filesystem::exists(target))
    throw TargetMissing("no such target binary: " + target.string());

  ExecImage image({target.string()}, {"FEATBENCH_SERVE=1"});
  Pipe to_child, from_child;
  int dev_null = open("/dev/null", O_WRONLY);

  pid_t pid = fork();
  if (pid < 0) throw SpawnFailure("fork() failed");
  if (pid == 0) {
    setpgid(0, 0);
    struct rlimit no_core{0, 0};
    setrlimit(RLIMIT_CORE, &no_core);
    dup2(to_child.read_end(), 0);
    dup2(from_child.write_end(), 1);
    if (dev_null >= 0) dup2(dev_null, 2);
    to_child.close_read();
    to_child.close_write();
    from_child.close_read();
    from_child.close_write();
    if (dev_null >= 0) close(dev_null);
    execve(image.argv[0], image.argv.data(), image.envp.data());
    _exit(127);
  }
  if (dev_null >= 0) close(dev_null);
  pid_ = pid;
  to_child_ = to_child.write_end();
  from_child_ = from_child.read_end();
  to_child.fds[1] = -1;    // ownership moved
  from_child.fds[0] = -1;
  signal(SIGPIPE, SIG_IGN);
}

ServeSession::~ServeSession() { shutdown(); }

void ServeSession::shutdown() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = -1;
  from_child_ = -1;
  if (pid_ > 0) {
    // EOF on stdin ends the serve loop; reap, nudging if it lingers.
    for (int i = 0; i < 50; ++i) {
      int status = 0;
      pid_t r = waitpid(pid_, &status, WNOHANG);
      if (r == pid_ || (r < 0 && errno == ECHILD)) {
        pid_ = -1;
        return;
      }
      if (i == 10) kill_group(pid_);
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    kill_group(pid_);
    waitpid(pid_, nullptr, 0);
    pid_ = -1;
  }
}

void ServeSession::run_batch(const uint8_t* inputs, size_t input_len,
                             size_t count, uint8_t* hits) {
  // Frame the whole batch, write it, then collect one byte per input.
  // Batches are capped below the response pipe capacity, so writing
  // everything before reading cannot deadlock.
  if (count > 16384)
    throw ExecFailure("serve batch too large for pipe capacity");
  std::vector<uint8_t> frames;
  frames.reserve(count * (4 + input_len));
  for (size_t i = 0; i < count; ++i) {
    uint32_t len = static_cast<uint32_t>(input_len);
    frames.push_back(static_cast<uint8_t>(len & 0xff));
    frames.push_back(static_cast<uint8_t>((len >> 8) & 0xff));
    frames.push_back(static_cast<uint8_t>((len >> 16) & 0xff));
    frames.push_back(static_cast<uint8_t>((len >> 24) & 0xff));
    frames.insert(frames.end(), inputs + i * input_len,
                  inputs + (i + 1) * input_len);
  }

  size_t off = 0;
  while (off < frames.size()) {
    ssize_t w = write(to_child_, frames.data() + off, frames.size() - off);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw ExecFailure("serve-mode target stopped accepting input");
    }
    off += static_cast<size_t>(w);
  }

  size_t got = 0;
  while (got < count) {
    ssize_t r = read(from_child_, hits + got, count - got);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) throw ExecFailure("serve-mode target closed its pipe");
    got += static_cast<size_t>(r);
  }
}

bool ServeSession::run_one(std::span<const uint8_t> input) {
  uint8_t hit = 0;
  run_batch(input.data(), input.size(), 1, &hit);
  return hit != 0;
}

// ---------------------------------------------------------------------------
// Compilation

namespace {

bool executable_at(const std::filesystem::path& p) {
  return access(p.c_str(), X_OK) == 0 &&
         std::filesystem::is_regular_file(p);
}

std::string path_lookup(const std::string& name) {
  if (name.find('/') != std::string::npos)
    return executable_at(name) ? name : std::string();
  const char* path = getenv("PATH");
  if (!path) return {};
  std::istringstream is(path);
  std::string dir;
  while (std::getline(is, dir, ':')) {
    if (dir.empty()) continue;
    std::filesystem::path candidate = std::filesystem::path(dir) / name;
    if (executable_at(candidate)) return candidate.string();
  }
  return {};
}

}  // namespace

std::string find_c_compiler() {
  if (const char* cc = getenv("CC"); cc && *cc) {
    std::string found = path_lookup(cc);
    if (!found.empty()) return found;
    throw CompilerMissing(std::string("$CC is set to '") + cc +
                          "' but it is not executable");
  }
  for (const char* name : {"cc", "gcc", "clang"}) {
    std::string found = path_lookup(name);
    if (!found.empty()) return found;
  }
  throw CompilerMissing(
      "no C compiler found: set $CC or install cc/gcc/clang");
}

BuildReport build_targets(std::span<const TargetInfo> targets,
                          const std::filesystem::path& bundle_root,
                          int jobs) {
  namespace fs = std::filesystem;
  std::string compiler = find_c_compiler();
  fs::create_directories(bundle_root / "bin");

  BuildReport report;
  report.outcomes.resize(targets.size());

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= targets.size()) return;
      const TargetInfo& t = targets[i];
      CompileOutcome outcome;
      outcome.program = t.name;
      fs::path src = bundle_root / t.file;
      fs::path bin = bundle_root / "bin" / t.name;
      if (!fs::exists(src)) {
        outcome.ok = false;
        outcome.diagnostics = "source file missing: " + src.string();
      } else {
        ExecResult r = run_process(
            {compiler, "-std=c99", "-O1", "-o", bin.string(), src.string()},
            {}, {}, 120.0);
        outcome.ok = !r.signaled && !r.timed_out && r.exit_code == 0;
        outcome.diagnostics = r.stderr_text;
      }
      report.outcomes[i] = std::move(outcome);
    }
  };

  int n = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (const auto& o : report.outcomes) (o.ok ? report.built : report.failed)++;
  return report;
}

std::string build_report_to_json(const BuildReport& report) {
  nlohmann::ordered_json j;
  j["built"] = report.built;
  j["failed"] = report.failed;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& o : report.outcomes) {
    nlohmann::ordered_json e;
    e["program"] = o.program;
    e["ok"] = o.ok;
    if (!o.diagnostics.empty()) e["diagnostics"] = o.diagnostics;
    arr.push_back(std::move(e));
  }
  j["targets"] = std::move(arr);
  return j.dump(2) + "\n";
}

}  // namespace featbench
