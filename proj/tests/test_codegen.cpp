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

#include <doctest.h>

#include <random>

#include "featbench/codegen.hpp"
#include "featbench/ground_truth.hpp"
#include "featbench/mixer.hpp"
#include "featbench/runner.hpp"
#include "featbench/target_layout.hpp"
#include "test_util.hpp"

using namespace featbench;

namespace {

size_t count_occurrences(const std::string& text, const std::string& needle) {
  size_t count = 0, pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

std::vector<uint8_t> le32_input(uint32_t hash, uint32_t len = 4) {
  std::vector<uint8_t> in(len, 0);
  in[0] = static_cast<uint8_t>(hash & 0xff);
  in[1] = static_cast<uint8_t>((hash >> 8) & 0xff);
  in[2] = static_cast<uint8_t>((hash >> 16) & 0xff);
  in[3] = static_cast<uint8_t>((hash >> 24) & 0xff);
  return in;
}

}  // namespace

TEST_CASE("emission is a pure function of the spec") {
  auto spec = parse_name("COMP_W3_D3_O4_B7");
  auto a = emit_source(spec);
  auto b = emit_source(spec);
  CHECK(a.code == b.code);
  CHECK(a.bug_marker == "FB_BUG:COMP_W3_D3_O4_B7");
  CHECK(a.entry_symbol == "COMP_W3_D3_O4_B7");
}

TEST_CASE("emitted code has exactly one fault site and all leaf markers") {
  auto spec = parse_name("COMP_W2_D3_O2_B5");
  auto unit = emit_source(spec);
  CHECK(count_occurrences(unit.code, "abort();") == 1);
  CHECK(count_occurrences(unit.code, "/* planted bug */") == 1);
  for (int leaf = 1; leaf <= 8; ++leaf) {
    std::string marker = "\"This is branch " + std::to_string(leaf) + "\"";
    CAPTURE(marker);
    CHECK(count_occurrences(unit.code, marker) == 1);
  }
  CHECK(count_occurrences(unit.code, unit.bug_marker) == 1);
}

TEST_CASE("every family emits a single fault site") {
  for (const char* name :
       {"COMWE_W2_D2_O8_B1", "COML_I3_DC1", "COMR_I2_DC0", "DMAG_S4_L3",
        "DCHK_C3", "DNST_D3_C1", "DNST_D2_C0", "DNST_D2_C2"}) {
    auto unit = emit_source(parse_name(name));
    CAPTURE(name);
    CHECK(count_occurrences(unit.code, "abort();") == 1);
  }
}

TEST_CASE("emitters check their family precondition") {
  auto tree = parse_name("COMP_W2_D2_O2_B1");
  auto magic = parse_name("DMAG_S4_L2");
  CHECK_THROWS_AS(emit_branch_tree(magic), InvalidSpec);
  CHECK_THROWS_AS(emit_loop(tree), InvalidSpec);
  CHECK_THROWS_AS(emit_magic(tree), InvalidSpec);
  CHECK_THROWS_AS(emit_checksum(tree), InvalidSpec);
  CHECK_THROWS_AS(emit_nested(tree), InvalidSpec);
}

TEST_CASE("route model matches the template's four-branch picture") {
  BranchTreeParams p{2, 2, 2, 1};
  // hash digits (level1, level2) in base 2: 0->(0,0) leaf 1, 1->(1,0) leaf 3,
  // 2->(0,1) leaf 2, 3->(1,1) leaf 4
  CHECK(route_leaf(p, 0) == 1);
  CHECK(route_leaf(p, 1) == 3);
  CHECK(route_leaf(p, 2) == 2);
  CHECK(route_leaf(p, 3) == 4);
}

TEST_CASE("bug path digits") {
  CHECK(bug_path_digits(BranchTreeParams{2, 2, 2, 1}) ==
        std::vector<uint32_t>{0, 0});
  CHECK(bug_path_digits(BranchTreeParams{2, 2, 2, 4}) ==
        std::vector<uint32_t>{1, 1});
  CHECK(bug_path_digits(BranchTreeParams{3, 2, 2, 5}) ==
        std::vector<uint32_t>{1, 1});
}

TEST_CASE("compiled branch tree agrees with the route model and aborts only "
          "on the buggy leaf") {
  testutil::TempDir dir("tree");
  auto spec = parse_name("COMP_W3_D2_O3_B5");
  const auto& p = std::get<BranchTreeParams>(spec.params);
  auto bin = testutil::compile_spec(spec, dir.path);

  std::mt19937_64 rng(99);
  ExecOptions opts;
  opts.trace = true;
  for (int i = 0; i < 40; ++i) {
    uint32_t hash = static_cast<uint32_t>(rng());
    auto result = exec_target(bin, le32_input(hash), opts);
    uint32_t expected_leaf = route_leaf(p, hash);
    auto markers = marker_lines(result.stdout_text);
    REQUIRE(markers.size() == 1);  // exactly one leaf marker per traversal
    CHECK(markers[0] == "This is branch " + std::to_string(expected_leaf));
    CHECK(result.aborted() == (expected_leaf == p.bug_branch));
    if (result.aborted()) {
      CHECK(confirms_bug(result, bug_marker_for(spec.name())));
    } else {
      CHECK(result.exit_code == 0);
    }
  }
}

TEST_CASE("exhaustive 16-bit enumeration: bug fraction is exactly "
          "weight^-depth") {
  // w=2, d=2, omega=4: selector base 4, 4^2 = 16 divides 2^16, so exactly
  // 1/16 of the 16-bit hash domain must reach the buggy leaf.
  testutil::TempDir dir("enum");
  auto spec = parse_name("COMP_W2_D2_O4_B1");
  auto bin = testutil::compile_spec(spec, dir.path);

  ServeSession session(bin);
  constexpr uint32_t kDomain = 1u << 16;
  constexpr size_t kBatch = 4096;
  std::vector<uint8_t> inputs(kBatch * 4);
  std::vector<uint8_t> hits(kBatch);
  uint64_t total_hits = 0;
  for (uint32_t base = 0; base < kDomain; base += kBatch) {
    for (size_t i = 0; i < kBatch; ++i) {
      uint32_t hash = base + static_cast<uint32_t>(i);
      inputs[i * 4 + 0] = static_cast<uint8_t>(hash & 0xff);
      inputs[i * 4 + 1] = static_cast<uint8_t>((hash >> 8) & 0xff);
      inputs[i * 4 + 2] = 0;
      inputs[i * 4 + 3] = 0;
    }
    session.run_batch(inputs.data(), 4, kBatch, hits.data());
    for (size_t i = 0; i < kBatch; ++i) total_hits += hits[i];
  }
  CHECK(total_hits == kDomain / 16);  // exact, not approximate

  // The in-process route model agrees exactly on the same domain.
  const auto& p = std::get<BranchTreeParams>(spec.params);
  uint64_t model_hits = 0;
  for (uint32_t hash = 0; hash < kDomain; ++hash)
    model_hits += route_leaf(p, hash) == p.bug_branch ? 1 : 0;
  CHECK(model_hits == total_hits);
}

TEST_CASE("loop targets: counter semantics") {
  testutil::TempDir dir("loop");

  SUBCASE("iteration 1 triggers on any nonempty input") {
    auto spec = parse_name("COML_I1_DC0");
    auto bin = testutil::compile_spec(spec, dir.path);
    std::vector<uint8_t> one{0x41};
    CHECK(exec_target(bin, one).aborted());
    CHECK(exec_target(bin, {}).exit_code == 0);  // empty input: no pass
  }

  SUBCASE("data constraint counts sentinel bytes only") {
    auto spec = parse_name("COML_I3_DC1");
    auto bin = testutil::compile_spec(spec, dir.path);
    std::vector<uint8_t> yes(spec.input_len, 0x4b);
    std::vector<uint8_t> no(spec.input_len, 0x41);
    CHECK(exec_target(bin, yes).aborted());
    CHECK(exec_target(bin, no).exit_code == 0);
    // exactly two sentinels: not enough
    std::vector<uint8_t> two(spec.input_len, 0x41);
    two[0] = two[5] = 0x4b;
    CHECK(exec_target(bin, two).exit_code == 0);
  }

  SUBCASE("recursion mirrors the loop") {
    auto spec = parse_name("COMR_I3_DC1");
    auto bin = testutil::compile_spec(spec, dir.path);
    std::vector<uint8_t> yes(spec.input_len, 0x41);
    yes[1] = yes[2] = yes[9] = 0x4b;
    CHECK(exec_target(bin, yes).aborted());
    std::vector<uint8_t> no(spec.input_len, 0x41);
    no[1] = no[2] = 0x4b;
    CHECK(exec_target(bin, no).exit_code == 0);
  }

  SUBCASE("iteration beyond input_len is unreachable: exhaustive over a "
          "reduced alphabet") {
    auto spec = ProgramSpec::make_with_len(
        FeatureFamily::kLoop, LoopParams{LoopParams::Kind::kLoop, 8, false},
        4);
    auto bin = testutil::compile_spec(spec, dir.path);
    ServeSession session(bin);
    // all 2^4 four-byte inputs over the alphabet {0x41, 0x4b}
    for (uint32_t mask = 0; mask < 16; ++mask) {
      std::vector<uint8_t> in(4);
      for (int bit = 0; bit < 4; ++bit)
        in[bit] = (mask >> bit) & 1 ? 0x4b : 0x41;
      CHECK(!session.run_one(in));
    }
  }
}

TEST_CASE("magic targets require the exact byte string") {
  testutil::TempDir dir("magic");
  auto spec = parse_name("DMAG_S4_L3");
  auto bin = testutil::compile_spec(spec, dir.path);

  auto witness = witness_input(spec);
  auto result = exec_target(bin, witness);
  CHECK(result.aborted());
  CHECK(confirms_bug(result, bug_marker_for(spec.name())));

  // Any single changed magic byte un-triggers the bug.
  auto magic = magic_bytes_for(spec.name(), 3);
  for (int i = 0; i < 3; ++i) {
    auto mutated = witness;
    mutated[4 + i] ^= 0x01;
    CAPTURE(i);
    CHECK(exec_target(bin, mutated).exit_code == 0);
  }
  // The magic region sits at the configured offset.
  CHECK(std::equal(magic.begin(), magic.end(), witness.begin() + 4));
}

TEST_CASE("checksum targets: patched sums pass, mutations fail") {
  testutil::TempDir dir("chk");
  auto spec = parse_name("DCHK_C2");
  auto bin = testutil::compile_spec(spec, dir.path);

  auto witness = witness_input(spec);
  CHECK(exec_target(bin, witness).aborted());

  // Flipping one byte of the second data region un-triggers the bug.
  auto mutated = witness;
  mutated[kChecksumTestBytes + 3] ^= 0xff;
  CHECK(exec_target(bin, mutated).exit_code == 0);

  // Re-patching the stored value revives it.
  uint32_t sum = add16(mutated.begin() + kChecksumTestBytes,
                       mutated.begin() + kChecksumTestBytes +
                           kChecksumRegionBytes);
  mutated[kChecksumTestBytes + kChecksumRegionBytes] =
      static_cast<uint8_t>(sum & 0xff);
  mutated[kChecksumTestBytes + kChecksumRegionBytes + 1] =
      static_cast<uint8_t>((sum >> 8) & 0xff);
  CHECK(exec_target(bin, mutated).aborted());
}

TEST_CASE("single-test checksum accepts any region with a matching sum") {
  testutil::TempDir dir("chk1");
  auto spec = parse_name("DCHK_C1");
  auto bin = testutil::compile_spec(spec, dir.path);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 5; ++i) {
    std::vector<uint8_t> in(spec.input_len, 0);
    for (uint32_t j = 0; j < kChecksumRegionBytes; ++j)
      in[j] = static_cast<uint8_t>(rng() & 0xff);
    uint32_t sum = add16(in.begin(), in.begin() + kChecksumRegionBytes);
    in[kChecksumRegionBytes] = static_cast<uint8_t>(sum & 0xff);
    in[kChecksumRegionBytes + 1] = static_cast<uint8_t>((sum >> 8) & 0xff);
    CHECK(exec_target(bin, in).aborted());
  }
}

TEST_CASE("nested depth=1 count=0 behaves like two magic bytes at offset 4") {
  testutil::TempDir dir("nst");
  auto spec = parse_name("DNST_D1_C0");
  auto bin = testutil::compile_spec(spec, dir.path);
  auto magic = magic_bytes_for(spec.name(), 2);

  std::vector<uint8_t> in(spec.input_len, 0);
  in[4] = magic[0];
  in[5] = magic[1];
  CHECK(exec_target(bin, in).aborted());
  in[5] ^= 0x10;
  CHECK(exec_target(bin, in).exit_code == 0);
}

TEST_CASE("nested magic wraps checksum levels") {
  testutil::TempDir dir("nst3");
  auto spec = parse_name("DNST_D3_C1");
  auto bin = testutil::compile_spec(spec, dir.path);
  auto witness = witness_input(spec);
  CHECK(exec_target(bin, witness).aborted());

  // Breaking the outer magic guard hides the inner levels entirely.
  auto mutated = witness;
  mutated[4] ^= 0x01;
  CHECK(exec_target(bin, mutated).exit_code == 0);
}

TEST_CASE("serve mode agrees with one-shot execution") {
  testutil::TempDir dir("serve");
  for (const char* name : {"COMP_W2_D2_O2_B1", "DMAG_S0_L1", "DCHK_C1"}) {
    auto spec = parse_name(name);
    auto bin = testutil::compile_spec(spec, dir.path);
    ServeSession session(bin);
    std::mt19937_64 rng(fnv1a64(name));
    for (int i = 0; i < 24; ++i) {
      std::vector<uint8_t> in(spec.input_len);
      for (auto& b : in) b = static_cast<uint8_t>(rng() & 0xff);
      bool serve_hit = session.run_one(in);
      bool real_hit = exec_target(bin, in).aborted();
      CAPTURE(name);
      CHECK(serve_hit == real_hit);
    }
  }
}

TEST_CASE("targets read input from a file path argument too") {
  testutil::TempDir dir("file");
  auto spec = parse_name("DMAG_S0_L2");
  auto bin = testutil::compile_spec(spec, dir.path);
  auto witness = witness_input(spec);
  ExecOptions opts;
  opts.input_via_file = true;
  opts.work_dir = dir.path;
  CHECK(exec_target(bin, witness, opts).aborted());
  std::vector<uint8_t> miss(spec.input_len, 0x2a);
  CHECK(exec_target(bin, miss, opts).exit_code == 0);
}

TEST_CASE("emit_all writes a deterministic bundle") {
  testutil::TempDir dir("bundle");
  std::vector<ProgramSpec> grid = {
      parse_name("COMP_W2_D1_O2_B1"),
      parse_name("DMAG_S0_L1"),
      parse_name("COML_I2_DC0"),
  };

  auto report = emit_all(grid, dir.path / "a");
  CHECK(report.written.size() == 3);
  CHECK(report.errors.empty());
  CHECK(std::filesystem::exists(dir.path / "a" / "build.sh"));
  auto manifest = load_manifest(dir.path / "a" / "manifest.json");
  REQUIRE(manifest.size() == 3);
  CHECK(manifest[0].name == "COMP_W2_D1_O2_B1");
  CHECK(manifest[0].bug_marker == "FB_BUG:COMP_W2_D1_O2_B1");
  CHECK(manifest[0].input_len == 4);

  emit_all(grid, dir.path / "b");
  for (const auto& t : manifest) {
    CHECK(testutil::read_file(dir.path / "a" / t.file) ==
          testutil::read_file(dir.path / "b" / t.file));
  }
  CHECK(testutil::read_file(dir.path / "a" / "manifest.json") ==
        testutil::read_file(dir.path / "b" / "manifest.json"));
}

TEST_CASE("emit_all aggregates per-spec errors without aborting the batch") {
  testutil::TempDir dir("bundle_err");
  ProgramSpec bad;  // raw construction bypasses make(): invalid on purpose
  bad.family = FeatureFamily::kBranchTree;
  bad.params = BranchTreeParams{2, 2, 2, 9};  // bug_branch > leaf count
  bad.input_len = 4;
  std::vector<ProgramSpec> grid = {parse_name("DMAG_S0_L1"), bad,
                                   parse_name("DCHK_C1")};
  auto report = emit_all(grid, dir.path);
  CHECK(report.written.size() == 2);
  REQUIRE(report.errors.size() == 1);
  CHECK(report.errors[0].program == "COMP_W2_D2_O2_B9");
  auto manifest = load_manifest(dir.path / "manifest.json");
  CHECK(manifest.size() == 2);
}

TEST_CASE("emit_all on an empty grid yields an empty valid manifest") {
  testutil::TempDir dir("bundle_empty");
  auto report = emit_all({}, dir.path);
  CHECK(report.written.empty());
  CHECK(report.errors.empty());
  CHECK(load_manifest(dir.path / "manifest.json").empty());
}

TEST_CASE("the generated build script compiles a bundle") {
  testutil::TempDir dir("script");
  std::vector<ProgramSpec> grid = {parse_name("DMAG_S0_L1"),
                                   parse_name("COML_I1_DC0")};
  emit_all(grid, dir.path);
  auto r = run_process({"/bin/sh", (dir.path / "build.sh").string()}, {}, {},
                       120.0);
  CHECK(r.exit_code == 0);
  CHECK(std::filesystem::exists(dir.path / "bin" / "DMAG_S0_L1"));
  CHECK(std::filesystem::exists(dir.path / "bin" / "COML_I1_DC0"));
}

TEST_CASE("depth-1 tree is a single conditional with the bug behind the "
          "privileged edge") {
  auto spec = parse_name("COMP_W2_D1_O2_B2");
  auto unit = emit_source(spec);
  // exactly one conditional in the decision nest
  CHECK(count_occurrences(unit.code, "if (u1") == 1);
  CHECK(count_occurrences(unit.code, "if (u2") == 0);

  // the privileged (1/omega) edge leads to leaf 2; with omega=2 both
  // leaves split the hash space evenly
  const auto& p = std::get<BranchTreeParams>(spec.params);
  size_t leaf2 = 0;
  for (uint32_t hash = 0; hash < 64; ++hash)
    leaf2 += route_leaf(p, hash) == 2 ? 1 : 0;
  CHECK(leaf2 == 32);

  testutil::TempDir dir("d1");
  auto bin = testutil::compile_spec(spec, dir.path);
  CHECK(exec_target(bin, le32_input(0)).aborted());   // digit 0: privileged
  CHECK(exec_target(bin, le32_input(1)).exit_code == 0);
}

TEST_CASE("markers stay silent without the trace switch") {
  testutil::TempDir dir("notrace");
  auto spec = parse_name("COMP_W2_D2_O2_B1");
  auto bin = testutil::compile_spec(spec, dir.path);
  auto result = exec_target(bin, le32_input(3));  // no trace requested
  CHECK(result.exit_code == 0);
  CHECK(result.stdout_text.empty());
}

TEST_CASE("unconstrained recursion trips on input length") {
  testutil::TempDir dir("recur");
  auto spec = parse_name("COMR_I2_DC0");
  auto bin = testutil::compile_spec(spec, dir.path);
  std::vector<uint8_t> two{0x00, 0x00};
  CHECK(exec_target(bin, two).aborted());
  std::vector<uint8_t> one{0x00};
  CHECK(exec_target(bin, one).exit_code == 0);
}

TEST_CASE("the fuzzer seed input sits on no grid program's bug path") {
  // The campaign seed (0x55 fill) must not trivially complete any target
  // whose bug is not probability-1; checked against the oracle models.
  for (const auto& spec : default_grid()) {
    CAPTURE(spec.name());
    switch (spec.family) {
      case FeatureFamily::kBranchTree:
      case FeatureFamily::kBranchWeight: {
        const auto& p = std::get<BranchTreeParams>(spec.params);
        CHECK(route_leaf(p, 0x55555555u) != p.bug_branch);
        break;
      }
      case FeatureFamily::kMagicBytes: {
        const auto& p = std::get<MagicBytesParams>(spec.params);
        auto magic = magic_bytes_for(spec.name(), p.length);
        bool all_seed = std::all_of(magic.begin(), magic.end(),
                                    [](uint8_t b) { return b == 0x55; });
        CHECK(!all_seed);
        break;
      }
      case FeatureFamily::kLoopDataConstraint:
        // 0x55 is not the sentinel; the counter never moves.
        CHECK(kLoopSentinel != 0x55);
        break;
      case FeatureFamily::kChecksum:
      case FeatureFamily::kNestedMagicChecksum:
        // add16 of sixteen 0x55 bytes is 0x550, the stored value 0x5555.
        CHECK(add16(std::vector<uint8_t>(16, 0x55).begin(),
                    std::vector<uint8_t>(16, 0x55).end()) != 0x5555u);
        break;
      case FeatureFamily::kLoop:
        break;  // probability 1 by design: any full-length input triggers
    }
  }
}
