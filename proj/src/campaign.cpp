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

#include "featbench/campaign.hpp"

#include <fcntl.h>
#include <fnmatch.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "featbench/builtin_fuzzers.hpp"
#include "featbench/errors.hpp"
#include "featbench/mixer.hpp"
#include "featbench/results_io.hpp"
#include "featbench/runner.hpp"
#include "featbench/toml_lite.hpp"

extern char** environ;

namespace featbench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string replace_all(std::string text, const std::string& from,
                        const std::string& to) {
  size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& p,
                      std::span<const uint8_t> bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

void validate_adapter(const FuzzerAdapter& adapter) {
  if (adapter.name.empty())
    throw ConfigError("adapter without a name");
  if (adapter.name.find_first_not_of(
          "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-") !=
      std::string::npos)
    throw ConfigError("adapter name '" + adapter.name +
                      "' may only use [A-Za-z0-9_-]");
  if (adapter.command_template.find("{target}") == std::string::npos)
    throw ConfigError("adapter '" + adapter.name +
                      "': command template must contain {target}");
  if (!adapter.is_builtin() &&
      adapter.crash_probe == FuzzerAdapter::CrashProbe::kCrashDir &&
      adapter.crash_glob.empty())
    throw ConfigError("adapter '" + adapter.name +
                      "': crash_dir probe needs a crash_glob");
  for (const auto& kv : adapter.env) {
    if (kv.find('=') == std::string::npos)
      throw ConfigError("adapter '" + adapter.name + "': env entry '" + kv +
                        "' is not KEY=VALUE");
  }
}

std::vector<FuzzerAdapter> builtin_adapters() {
  FuzzerAdapter random;
  random.name = "random";
  random.command_template = "builtin:random {target}";
  FuzzerAdapter marker;
  marker.name = "marker";
  marker.command_template = "builtin:marker {target}";
  return {random, marker};
}

namespace {

FuzzerAdapter::CrashProbe probe_from_string(const std::string& s) {
  if (s == "signal_exit") return FuzzerAdapter::CrashProbe::kSignalExit;
  if (s == "crash_dir") return FuzzerAdapter::CrashProbe::kCrashDir;
  throw ConfigError("unknown crash_probe '" + s + "'");
}

std::vector<FuzzerAdapter> adapters_from_json(const std::string& text) {
  auto doc = nlohmann::json::parse(text);
  std::vector<FuzzerAdapter> adapters;
  for (const auto& [name, j] : doc.at("adapters").items()) {
    FuzzerAdapter a;
    a.name = name;
    a.command_template = j.at("command");
    if (j.contains("crash_probe"))
      a.crash_probe = probe_from_string(j.at("crash_probe"));
    if (j.contains("crash_glob")) a.crash_glob = j.at("crash_glob");
    if (j.contains("env")) a.env = j.at("env").get<std::vector<std::string>>();
    validate_adapter(a);
    adapters.push_back(std::move(a));
  }
  return adapters;
}

std::vector<FuzzerAdapter> adapters_from_toml(const std::string& text) {
  toml_lite::Table table = toml_lite::parse(text);
  // Keys look like "adapters.<name>.command".
  std::vector<std::string> names;
  for (const auto& [key, value] : table) {
    if (key.rfind("adapters.", 0) != 0) continue;
    size_t dot = key.find('.', 9);
    if (dot == std::string::npos) continue;
    std::string name = key.substr(9, dot - 9);
    if (std::find(names.begin(), names.end(), name) == names.end())
      names.push_back(name);
  }
  std::vector<FuzzerAdapter> adapters;
  for (const auto& name : names) {
    std::string prefix = "adapters." + name + ".";
    FuzzerAdapter a;
    a.name = name;
    a.command_template = toml_lite::require_string(table, prefix + "command");
    if (auto probe = toml_lite::get_string(table, prefix + "crash_probe"))
      a.crash_probe = probe_from_string(*probe);
    if (auto glob = toml_lite::get_string(table, prefix + "crash_glob"))
      a.crash_glob = *glob;
    if (auto env = toml_lite::get_string_array(table, prefix + "env"))
      a.env = *env;
    validate_adapter(a);
    adapters.push_back(std::move(a));
  }
  return adapters;
}

}  // namespace

std::vector<FuzzerAdapter> load_adapters(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read adapter file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  if (path.extension() == ".json") return adapters_from_json(ss.str());
  return adapters_from_toml(ss.str());
}

// ---------------------------------------------------------------------------
// Campaigns

namespace {

// Confirmation guards against fuzzer-side false positives: the input must
// reproduce SIGABRT and print this exact program's marker.
bool confirm_crash(const TargetRuntime& target,
                   std::span<const uint8_t> input) {
  ExecOptions opts;
  opts.timeout_s = 10.0;
  ExecResult r = exec_target(target.binary, input, opts);
  return confirms_bug(r, target.bug_marker);
}

CampaignResult run_builtin_campaign(const TargetRuntime& target,
                                    const FuzzerAdapter& adapter,
                                    const CampaignOptions& options,
                                    uint32_t trial, uint64_t seed) {
  uint64_t budget_execs =
      options.exec_budget != 0
          ? options.exec_budget
          : static_cast<uint64_t>(options.timeout_s * kBuiltinExecsPerSecond);
  FuzzBudget budget{budget_execs, options.timeout_s};

  FuzzOutcome outcome;
  if (adapter.command_template.rfind("builtin:random", 0) == 0) {
    // Campaign mode runs one process per input: runtimes then scale with
    // executions the way they do for ordinary fuzzer harnesses.
    outcome = run_random_fuzzer(target.binary, target.input_len, budget, seed,
                                ExecStrategy::kProcessPerExec);
  } else if (adapter.command_template.rfind("builtin:marker", 0) == 0) {
    outcome = run_marker_fuzzer(target.binary, target.input_len, budget, seed);
  } else {
    throw ConfigError("unknown builtin fuzzer: " + adapter.command_template);
  }

  CampaignResult result;
  result.program = target.name;
  result.fuzzer = adapter.name;
  result.trial = trial;
  result.seed = seed;
  result.executions = outcome.executions;
  if (outcome.found && confirm_crash(target, outcome.crashing_input)) {
    result.completed = true;
    result.runtime_s = std::min(outcome.seconds_to_detection, options.timeout_s);
    if (!options.scratch_dir.empty()) {
      std::filesystem::create_directories(options.scratch_dir);
      write_file_bytes(options.scratch_dir / "repro.bin",
                       outcome.crashing_input);
    }
  } else {
    result.completed = false;
    result.runtime_s = options.timeout_s;
  }
  return result;
}

struct ExternalProcess {
  pid_t pid = -1;

  void spawn(const std::string& command, const std::vector<std::string>& env,
             const std::filesystem::path& log_path) {
    std::vector<std::string> argv_store = {"/bin/sh", "-c", command};
    std::vector<std::string> envp_store;
    for (char** e = environ; *e; ++e) envp_store.emplace_back(*e);
    for (const auto& kv : env) envp_store.push_back(kv);
    std::vector<char*> argv, envp;
    for (auto& s : argv_store) argv.push_back(s.data());
    argv.push_back(nullptr);
    for (auto& s : envp_store) envp.push_back(s.data());
    envp.push_back(nullptr);

    int log_fd = ::open(log_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);

    pid = fork();
    if (pid < 0) throw SpawnFailure("fork() failed");
    if (pid == 0) {
      setpgid(0, 0);
      int devnull = ::open("/dev/null", O_RDONLY);
      if (devnull >= 0) dup2(devnull, 0);
      if (log_fd >= 0) {
        dup2(log_fd, 1);
        dup2(log_fd, 2);
      }
      execve("/bin/sh", argv.data(), envp.data());
      _exit(127);
    }
    if (log_fd >= 0) close(log_fd);
  }

  // Returns true once the process has exited (status reaped).
  bool exited(int* status) {
    if (pid < 0) return true;
    pid_t r = waitpid(pid, status, WNOHANG);
    if (r == pid) {
      pid = -1;
      return true;
    }
    return false;
  }

  void terminate_group(pid_t group) {
    if (group <= 0) return;
    kill(-group, SIGTERM);
    auto start = Clock::now();
    while (seconds_since(start) < kKillGraceSeconds) {
      int status = 0;
      if (pid < 0 || waitpid(pid, &status, WNOHANG) == pid) {
        pid = -1;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    kill(-group, SIGKILL);
    if (pid > 0) {
      waitpid(pid, nullptr, 0);
      pid = -1;
    }
  }
};

std::vector<std::filesystem::path> glob_files(
    const std::filesystem::path& root, const std::string& glob) {
  std::vector<std::filesystem::path> matches;
  std::error_code ec;
  for (auto it = std::filesystem::recursive_directory_iterator(root, ec);
       !ec && it != std::filesystem::recursive_directory_iterator();
       it.increment(ec)) {
    if (!it->is_regular_file(ec)) continue;
    std::string rel =
        std::filesystem::relative(it->path(), root, ec).generic_string();
    if (fnmatch(glob.c_str(), rel.c_str(), 0) == 0)
      matches.push_back(it->path());
  }
  std::sort(matches.begin(), matches.end());
  return matches;
}

CampaignResult run_external_campaign(const TargetRuntime& target,
                                     const FuzzerAdapter& adapter,
                                     const CampaignOptions& options,
                                     uint32_t trial, uint64_t seed) {
  namespace fs = std::filesystem;
  fs::path scratch = options.scratch_dir.empty()
                         ? fs::temp_directory_path() / "featbench_campaign"
                         : options.scratch_dir;
  fs::path corpus_in = scratch / "corpus_in";
  fs::path out_dir = scratch / "out";
  fs::create_directories(corpus_in);
  fs::remove_all(out_dir);
  fs::create_directories(out_dir);
  write_file_bytes(corpus_in / "seed", seed_input(target.input_len));

  std::string command = adapter.command_template;
  command = replace_all(command, "{target}",
                        fs::absolute(target.binary).string());
  command = replace_all(command, "{corpus_in}",
                        fs::absolute(corpus_in).string());
  command = replace_all(command, "{out_dir}", fs::absolute(out_dir).string());
  command = replace_all(command, "{timeout_s}",
                        std::to_string(static_cast<long>(options.timeout_s)));

  std::vector<std::string> env = adapter.env;
  env.push_back("FEATBENCH_TRIAL_SEED=" + std::to_string(seed));

  ExternalProcess proc;
  proc.spawn(command, env, scratch / "fuzzer.log");
  pid_t group = proc.pid;
  auto start = Clock::now();

  CampaignResult result;
  result.program = target.name;
  result.fuzzer = adapter.name;
  result.trial = trial;
  result.seed = seed;

  std::set<fs::path> rejected;
  bool fuzzer_exited = false;
  int exit_status = 0;

  while (true) {
    double elapsed = seconds_since(start);
    // Scan for crash artifacts before timeout/exit decisions so nothing
    // written at the last moment is missed.
    if (adapter.crash_probe == FuzzerAdapter::CrashProbe::kCrashDir) {
      for (const auto& path : glob_files(out_dir, adapter.crash_glob)) {
        if (rejected.count(path)) continue;
        auto bytes = read_file_bytes(path);
        if (confirm_crash(target, bytes)) {
          result.completed = true;
          result.runtime_s = std::min(elapsed, options.timeout_s);
          write_file_bytes(scratch / "repro.bin", bytes);
          proc.terminate_group(group);
          return result;
        }
        rejected.insert(path);  // unrelated crash: discard
      }
    } else if (fuzzer_exited) {
      fs::path crash_input = out_dir / "crash_input";
      if (fs::exists(crash_input)) {
        auto bytes = read_file_bytes(crash_input);
        if (confirm_crash(target, bytes)) {
          result.completed = true;
          result.runtime_s = std::min(elapsed, options.timeout_s);
          write_file_bytes(scratch / "repro.bin", bytes);
          return result;
        }
      }
      throw AdapterMisbehavior(
          adapter.name + " exited (status " + std::to_string(exit_status) +
          ") without a reproducible crash on " + target.name);
    }

    if (!fuzzer_exited && proc.exited(&exit_status)) {
      fuzzer_exited = true;
      if (adapter.crash_probe == FuzzerAdapter::CrashProbe::kCrashDir) {
        // One more scan next iteration, then give up.
        double remaining = options.timeout_s - elapsed;
        if (remaining <= 0.3) {
          result.completed = false;
          result.runtime_s = options.timeout_s;
          return result;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
        for (const auto& path : glob_files(out_dir, adapter.crash_glob)) {
          if (rejected.count(path)) continue;
          auto bytes = read_file_bytes(path);
          if (confirm_crash(target, bytes)) {
            result.completed = true;
            result.runtime_s =
                std::min(seconds_since(start), options.timeout_s);
            write_file_bytes(scratch / "repro.bin", bytes);
            return result;
          }
        }
        throw AdapterMisbehavior(adapter.name + " exited (status " +
                                 std::to_string(exit_status) +
                                 ") without a crash on " + target.name);
      }
      continue;  // signal_exit probe: handled at the top of the loop
    }

    if (elapsed >= options.timeout_s) {
      proc.terminate_group(group);
      result.completed = false;
      result.runtime_s = options.timeout_s;
      return result;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
}

}  // namespace

CampaignResult run_campaign(const TargetRuntime& target,
                            const FuzzerAdapter& adapter,
                            const CampaignOptions& options, uint32_t trial,
                            uint64_t seed) {
  validate_adapter(adapter);
  if (!std::filesystem::exists(target.binary))
    throw TargetMissing("target binary missing: " + target.binary.string());
  if (adapter.is_builtin())
    return run_builtin_campaign(target, adapter, options, trial, seed);
  return run_external_campaign(target, adapter, options, trial, seed);
}

std::vector<CampaignResult> run_matrix(std::span<const TargetRuntime> targets,
                                       std::span<const FuzzerAdapter> fuzzers,
                                       const MatrixOptions& options,
                                       const std::filesystem::path& results_csv) {
  namespace fs = std::filesystem;

  std::vector<CampaignResult> existing;
  if (fs::exists(results_csv) && fs::file_size(results_csv) > 0) {
    if (!options.resume)
      throw ConfigError("results file " + results_csv.string() +
                        " already has data; pass resume or use a fresh "
                        "output directory");
    existing = load_results_csv(results_csv);
  }

  std::set<std::tuple<std::string, std::string, uint32_t>> done;
  for (const auto& r : existing) done.insert({r.program, r.fuzzer, r.trial});

  struct Cell {
    const TargetRuntime* target;
    const FuzzerAdapter* fuzzer;
    uint32_t trial;
  };
  std::vector<Cell> cells;
  for (const auto& t : targets)
    for (const auto& f : fuzzers)
      for (uint32_t trial = 0; trial < options.trials; ++trial)
        if (!done.count({t.name, f.name, trial}))
          cells.push_back({&t, &f, trial});

  ResultsAppender appender(results_csv);
  std::vector<CampaignResult> fresh;
  std::mutex fresh_mu;
  std::atomic<size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& cell = cells[i];
      CampaignOptions copts;
      copts.timeout_s = options.timeout_s;
      copts.exec_budget = options.exec_budget;
      copts.scratch_dir = options.out_dir / "campaigns" / cell.fuzzer->name /
                          cell.target->name /
                          ("t" + std::to_string(cell.trial));
      uint64_t seed = derive_seed(options.master_seed, cell.target->name,
                                  cell.fuzzer->name, cell.trial);
      try {
        CampaignResult r =
            run_campaign(*cell.target, *cell.fuzzer, copts, cell.trial, seed);
        appender.append(r);
        std::lock_guard<std::mutex> lock(fresh_mu);
        fresh.push_back(std::move(r));
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(fresh_mu);
        std::cerr << "campaign " << cell.fuzzer->name << " x "
                  << cell.target->name << " t" << cell.trial
                  << " failed: " << e.what() << "\n";
      }
    }
  };

  int jobs = std::max(1, options.jobs);
  std::vector<std::thread> pool;
  for (int i = 1; i < jobs; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<CampaignResult> all = std::move(existing);
  all.insert(all.end(), fresh.begin(), fresh.end());
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return std::tie(a.program, a.fuzzer, a.trial) <
           std::tie(b.program, b.fuzzer, b.trial);
  });
  return all;
}

}  // namespace featbench
