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

#include "featbench/feature_model.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <initializer_list>
#include <sstream>

#include <nlohmann/json.hpp>

#include "featbench/mixer.hpp"
#include "featbench/target_layout.hpp"

namespace featbench {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr uint64_t kLeafGuard = 1u << 20;
// The per-level selector consumes digits of the 32-bit input hash in base
// weight*(width-1); beyond 2^32 the deeper levels would run out of entropy.
constexpr uint64_t kSelectorGuard = 1ull << 32;

struct FamilyInfo {
  FeatureFamily family;
  const char* name;
  bool control_flow;
};

constexpr std::array<FamilyInfo, kFamilyCount> kFamilies{{
    {FeatureFamily::kBranchTree, "branch_tree", true},
    {FeatureFamily::kBranchWeight, "branch_weight", true},
    {FeatureFamily::kLoop, "loop", true},
    {FeatureFamily::kLoopDataConstraint, "loop_data_constraint", true},
    {FeatureFamily::kMagicBytes, "magic_bytes", false},
    {FeatureFamily::kChecksum, "checksum", false},
    {FeatureFamily::kNestedMagicChecksum, "nested_magic_checksum", false},
}};

const FamilyInfo& info_for(FeatureFamily f) {
  for (const auto& fi : kFamilies) {
    if (fi.family == f) return fi;
  }
  throw Error("unknown feature family");
}

bool is_tree_family(FeatureFamily f) {
  return f == FeatureFamily::kBranchTree || f == FeatureFamily::kBranchWeight;
}

bool is_loop_family(FeatureFamily f) {
  return f == FeatureFamily::kLoop || f == FeatureFamily::kLoopDataConstraint;
}

uint64_t ipow(uint64_t base, uint32_t exp, uint64_t guard,
              const char* what) {
  uint64_t r = 1;
  for (uint32_t i = 0; i < exp; ++i) {
    r *= base;
    if (r > guard) throw OverflowError(what);
  }
  return r;
}

}  // namespace

const char* family_name(FeatureFamily f) { return info_for(f).name; }

bool is_control_flow(FeatureFamily f) { return info_for(f).control_flow; }

uint64_t leaf_count(const BranchTreeParams& p) {
  return ipow(p.width, p.depth, kLeafGuard,
              "branch tree leaf count exceeds 2^20");
}

uint32_t min_input_len(FeatureFamily family, const FeatureParams& params) {
  switch (family) {
    case FeatureFamily::kBranchTree:
    case FeatureFamily::kBranchWeight:
      return kHashBytes;
    case FeatureFamily::kLoop:
    case FeatureFamily::kLoopDataConstraint:
      // Length-infeasible loop specs are valid; their bug is unreachable.
      return 1;
    case FeatureFamily::kMagicBytes: {
      const auto& p = std::get<MagicBytesParams>(params);
      return p.start + p.length;
    }
    case FeatureFamily::kChecksum: {
      const auto& p = std::get<ChecksumParams>(params);
      return p.count * kChecksumTestBytes;
    }
    case FeatureFamily::kNestedMagicChecksum: {
      const auto& p = std::get<NestedParams>(params);
      return kNestedBaseOffset + (p.depth - p.count) * kNestedMagicBytes +
             p.count * kChecksumTestBytes;
    }
  }
  throw Error("unknown feature family");
}

uint32_t default_input_len(FeatureFamily family, const FeatureParams& params) {
  if (is_tree_family(family)) return kHashBytes;
  if (is_loop_family(family)) {
    return std::max(kDefaultInputLen, std::get<LoopParams>(params).iteration);
  }
  return std::max(kDefaultInputLen, min_input_len(family, params));
}

void validate(const ProgramSpec& spec) {
  const auto fail = [&](const std::string& why) {
    throw InvalidSpec(why + " (family " + family_name(spec.family) + ")");
  };

  switch (spec.family) {
    case FeatureFamily::kBranchTree:
    case FeatureFamily::kBranchWeight: {
      const auto* p = std::get_if<BranchTreeParams>(&spec.params);
      if (!p) fail("parameter record does not match family");
      if (p->width < 2) fail("width must be >= 2");
      if (p->depth < 1) fail("depth must be >= 1");
      if (p->weight < 2) fail("weight must be >= 2");
      uint64_t leaves = leaf_count(*p);
      if (p->bug_branch < 1 || p->bug_branch > leaves)
        fail("bug_branch out of range 1..width^depth");
      ipow(uint64_t{p->weight} * (p->width - 1), p->depth, kSelectorGuard,
           "selector space exceeds 2^32");
      break;
    }
    case FeatureFamily::kLoop:
    case FeatureFamily::kLoopDataConstraint: {
      const auto* p = std::get_if<LoopParams>(&spec.params);
      if (!p) fail("parameter record does not match family");
      if (p->iteration < 1) fail("iteration must be >= 1");
      bool wants = spec.family == FeatureFamily::kLoopDataConstraint;
      if (p->has_data_constraint != wants)
        fail("has_data_constraint does not match family");
      break;
    }
    case FeatureFamily::kMagicBytes: {
      const auto* p = std::get_if<MagicBytesParams>(&spec.params);
      if (!p) fail("parameter record does not match family");
      if (p->length < 1) fail("length must be >= 1");
      break;
    }
    case FeatureFamily::kChecksum: {
      const auto* p = std::get_if<ChecksumParams>(&spec.params);
      if (!p) fail("parameter record does not match family");
      if (p->count < 1) fail("count must be >= 1");
      break;
    }
    case FeatureFamily::kNestedMagicChecksum: {
      const auto* p = std::get_if<NestedParams>(&spec.params);
      if (!p) fail("parameter record does not match family");
      if (p->depth < 1) fail("depth must be >= 1");
      if (p->count > p->depth) fail("count must be <= depth");
      break;
    }
  }

  if (spec.input_len < min_input_len(spec.family, spec.params))
    fail("input_len below the family minimum");
}

ProgramSpec ProgramSpec::make(FeatureFamily family, FeatureParams params) {
  ProgramSpec spec{family, params, 0};
  spec.input_len = default_input_len(family, params);
  validate(spec);
  return spec;
}

ProgramSpec ProgramSpec::make_with_len(FeatureFamily family,
                                       FeatureParams params,
                                       uint32_t input_len) {
  ProgramSpec spec{family, params, input_len};
  validate(spec);
  return spec;
}

std::string ProgramSpec::name() const { return format_name(*this); }

std::string format_name(const ProgramSpec& spec) {
  std::ostringstream os;
  switch (spec.family) {
    case FeatureFamily::kBranchTree:
    case FeatureFamily::kBranchWeight: {
      const auto& p = std::get<BranchTreeParams>(spec.params);
      os << (spec.family == FeatureFamily::kBranchTree ? "COMP" : "COMWE");
      os << "_W" << p.width << "_D" << p.depth << "_O" << p.weight << "_B"
         << p.bug_branch;
      break;
    }
    case FeatureFamily::kLoop:
    case FeatureFamily::kLoopDataConstraint: {
      const auto& p = std::get<LoopParams>(spec.params);
      os << (p.kind == LoopParams::Kind::kLoop ? "COML" : "COMR");
      os << "_I" << p.iteration << "_DC" << (p.has_data_constraint ? 1 : 0);
      break;
    }
    case FeatureFamily::kMagicBytes: {
      const auto& p = std::get<MagicBytesParams>(spec.params);
      os << "DMAG_S" << p.start << "_L" << p.length;
      break;
    }
    case FeatureFamily::kChecksum: {
      const auto& p = std::get<ChecksumParams>(spec.params);
      os << "DCHK_C" << p.count;
      break;
    }
    case FeatureFamily::kNestedMagicChecksum: {
      const auto& p = std::get<NestedParams>(spec.params);
      os << "DNST_D" << p.depth << "_C" << p.count;
      break;
    }
  }
  return os.str();
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (true) {
    size_t next = s.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

// Strict canonical integer: digits only, no leading zeros (except "0").
uint32_t parse_field(const std::string& name, const std::string& token,
                     const std::string& key) {
  if (token.size() <= key.size() || token.compare(0, key.size(), key) != 0)
    throw MalformedName("'" + name + "': expected field " + key);
  std::string digits = token.substr(key.size());
  if (digits.size() > 1 && digits[0] == '0')
    throw MalformedName("'" + name + "': non-canonical number in " + key);
  uint32_t value = 0;
  auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size())
    throw MalformedName("'" + name + "': bad number in field " + key);
  return value;
}

}  // namespace

ProgramSpec parse_name(const std::string& name) {
  auto tokens = split(name, '_');
  if (tokens.empty()) throw MalformedName("empty name");
  const std::string& prefix = tokens[0];

  const auto expect_fields = [&](size_t n) {
    if (tokens.size() != n + 1)
      throw MalformedName("'" + name + "': expected " + std::to_string(n) +
                          " fields after " + prefix);
  };

  try {
    if (prefix == "COMP" || prefix == "COMWE") {
      expect_fields(4);
      BranchTreeParams p;
      p.width = parse_field(name, tokens[1], "W");
      p.depth = parse_field(name, tokens[2], "D");
      p.weight = parse_field(name, tokens[3], "O");
      p.bug_branch = parse_field(name, tokens[4], "B");
      auto family = prefix == "COMP" ? FeatureFamily::kBranchTree
                                     : FeatureFamily::kBranchWeight;
      return ProgramSpec::make(family, p);
    }
    if (prefix == "COML" || prefix == "COMR") {
      expect_fields(2);
      LoopParams p;
      p.kind = prefix == "COML" ? LoopParams::Kind::kLoop
                                : LoopParams::Kind::kRecursion;
      p.iteration = parse_field(name, tokens[1], "I");
      uint32_t dc = parse_field(name, tokens[2], "DC");
      if (dc > 1)
        throw MalformedName("'" + name + "': DC field must be 0 or 1");
      p.has_data_constraint = dc == 1;
      auto family = p.has_data_constraint ? FeatureFamily::kLoopDataConstraint
                                          : FeatureFamily::kLoop;
      return ProgramSpec::make(family, p);
    }
    if (prefix == "DMAG") {
      expect_fields(2);
      MagicBytesParams p;
      p.start = parse_field(name, tokens[1], "S");
      p.length = parse_field(name, tokens[2], "L");
      return ProgramSpec::make(FeatureFamily::kMagicBytes, p);
    }
    if (prefix == "DCHK") {
      expect_fields(1);
      ChecksumParams p;
      p.count = parse_field(name, tokens[1], "C");
      return ProgramSpec::make(FeatureFamily::kChecksum, p);
    }
    if (prefix == "DNST") {
      expect_fields(2);
      NestedParams p;
      p.depth = parse_field(name, tokens[1], "D");
      p.count = parse_field(name, tokens[2], "C");
      return ProgramSpec::make(FeatureFamily::kNestedMagicChecksum, p);
    }
  } catch (const MalformedName&) {
    throw;
  } catch (const InvalidSpec& e) {
    throw MalformedName("'" + name + "': " + e.what());
  }
  throw MalformedName("'" + name + "': unknown family prefix '" + prefix +
                      "'");
}

// --------------------------------------------------------------------------
// The frozen default grid: 153 programs.
//
//   COMP  41   COMWE 20   COML/COMR 40   DMAG 20   DCHK 12   DNST 20
//
// Baselines: trees w=2 d=2 omega=2 b=1; loops DC0; magic S=4 L=2;
// nested count=1. Every parameter is swept against its baseline below.

std::vector<ProgramSpec> default_grid() {
  std::vector<ProgramSpec> grid;
  grid.reserve(153);

  const auto tree = [&](FeatureFamily fam, uint32_t w, uint32_t d, uint32_t om,
                        uint32_t b) {
    grid.push_back(ProgramSpec::make(fam, BranchTreeParams{w, d, om, b}));
  };
  const auto loop = [&](LoopParams::Kind kind, uint32_t iter, bool dc) {
    auto fam = dc ? FeatureFamily::kLoopDataConstraint : FeatureFamily::kLoop;
    grid.push_back(ProgramSpec::make(fam, LoopParams{kind, iter, dc}));
  };

  // Branch trees: (width, depth, weight) cross with the bug on leaf 1,
  // then depth/width extensions and the bug-branch set.
  for (uint32_t w : {2, 3})
    for (uint32_t d : {1, 2, 3, 4})
      for (uint32_t om : {2, 3, 4}) tree(FeatureFamily::kBranchTree, w, d, om, 1);
  for (uint32_t d : {5, 6}) tree(FeatureFamily::kBranchTree, 2, d, 2, 1);
  for (uint32_t w : {4, 5, 6}) tree(FeatureFamily::kBranchTree, w, 2, 2, 1);
  tree(FeatureFamily::kBranchTree, 4, 3, 2, 1);
  tree(FeatureFamily::kBranchTree, 4, 4, 2, 1);
  tree(FeatureFamily::kBranchTree, 5, 3, 2, 1);
  tree(FeatureFamily::kBranchTree, 6, 3, 2, 1);
  for (uint32_t b : {5, 9, 13, 16}) tree(FeatureFamily::kBranchTree, 2, 4, 2, b);
  for (uint32_t b : {5, 9}) tree(FeatureFamily::kBranchTree, 3, 2, 2, b);
  for (uint32_t b : {4, 8}) tree(FeatureFamily::kBranchTree, 2, 3, 2, b);

  // Branch weight: the weight ladder at small trees.
  for (uint32_t w : {2, 3})
    for (uint32_t d : {2, 3})
      for (uint32_t om : {2, 3, 4, 6, 8})
        tree(FeatureFamily::kBranchWeight, w, d, om, 1);

  // Loops and recursions: iteration ladder, then the constrained variants.
  for (auto kind : {LoopParams::Kind::kLoop, LoopParams::Kind::kRecursion}) {
    for (uint32_t i : {1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64})
      loop(kind, i, false);
    for (uint32_t i : {1, 2, 3, 4, 5, 6, 8, 10}) loop(kind, i, true);
  }

  // Magic bytes: length ladder at S=4, start ladder at L=2, fill-in cross.
  const std::pair<uint32_t, uint32_t> magic[] = {
      {4, 1},  {4, 2},  {4, 3}, {4, 4}, {4, 6}, {4, 8},  // length ladder
      {0, 2},  {8, 2},  {16, 2}, {32, 2}, {48, 2},       // start ladder
      {0, 1},  {0, 3},  {0, 4}, {0, 6},                  // fill-in at S=0
      {8, 1},  {8, 3},  {8, 4}, {8, 6},                  // fill-in at S=8
      {48, 4},
  };
  for (auto [s, l] : magic)
    grid.push_back(
        ProgramSpec::make(FeatureFamily::kMagicBytes, MagicBytesParams{s, l}));

  // Checksums: count ladder.
  for (uint32_t c : {1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 14, 16})
    grid.push_back(
        ProgramSpec::make(FeatureFamily::kChecksum, ChecksumParams{c}));

  // Nested magic/checksum: depth ladder at count=1, pure-magic nests, and
  // deeper checksum mixes.
  const std::pair<uint32_t, uint32_t> nested[] = {
      {1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1},
      {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0},
      {2, 2}, {3, 2}, {3, 3}, {4, 2}, {4, 3},
      {4, 4}, {5, 2}, {5, 3}, {5, 4}, {5, 5},
  };
  for (auto [d, c] : nested)
    grid.push_back(ProgramSpec::make(FeatureFamily::kNestedMagicChecksum,
                                     NestedParams{d, c}));

  return grid;
}

// --------------------------------------------------------------------------
// Parameters.

namespace {

struct ParameterInfo {
  Parameter parameter;
  const char* code;
};

constexpr std::array<ParameterInfo, kParameterCount> kParameters{{
    {Parameter::kDepth, "COMD"},
    {Parameter::kWidth, "COMW"},
    {Parameter::kWeight, "COMWE"},
    {Parameter::kBugBranch, "COMB"},
    {Parameter::kIteration, "COMI"},
    {Parameter::kDataConstraint, "COMDC"},
    {Parameter::kMagicStart, "DMAS"},
    {Parameter::kMagicLength, "DMAL"},
    {Parameter::kNestDepth, "DNSD"},
    {Parameter::kChecksumCount, "DCHC"},
}};

}  // namespace

const char* parameter_code(Parameter p) {
  for (const auto& pi : kParameters) {
    if (pi.parameter == p) return pi.code;
  }
  throw Error("unknown parameter");
}

std::optional<Parameter> parameter_from_code(const std::string& code) {
  for (const auto& pi : kParameters) {
    if (code == pi.code) return pi.parameter;
  }
  return std::nullopt;
}

std::optional<double> parameter_value(const ProgramSpec& spec, Parameter p) {
  switch (p) {
    case Parameter::kDepth:
      if (is_tree_family(spec.family))
        return std::get<BranchTreeParams>(spec.params).depth;
      return std::nullopt;
    case Parameter::kWidth:
      if (is_tree_family(spec.family))
        return std::get<BranchTreeParams>(spec.params).width;
      return std::nullopt;
    case Parameter::kWeight:
      if (is_tree_family(spec.family))
        return std::get<BranchTreeParams>(spec.params).weight;
      return std::nullopt;
    case Parameter::kBugBranch:
      if (is_tree_family(spec.family))
        return std::get<BranchTreeParams>(spec.params).bug_branch;
      return std::nullopt;
    case Parameter::kIteration:
      if (is_loop_family(spec.family))
        return std::get<LoopParams>(spec.params).iteration;
      return std::nullopt;
    case Parameter::kDataConstraint:
      if (is_loop_family(spec.family))
        return std::get<LoopParams>(spec.params).has_data_constraint ? 1.0
                                                                     : 0.0;
      return std::nullopt;
    case Parameter::kMagicStart:
      if (spec.family == FeatureFamily::kMagicBytes)
        return std::get<MagicBytesParams>(spec.params).start;
      return std::nullopt;
    case Parameter::kMagicLength:
      if (spec.family == FeatureFamily::kMagicBytes)
        return std::get<MagicBytesParams>(spec.params).length;
      return std::nullopt;
    case Parameter::kNestDepth:
      if (spec.family == FeatureFamily::kNestedMagicChecksum)
        return std::get<NestedParams>(spec.params).depth;
      return std::nullopt;
    case Parameter::kChecksumCount:
      if (spec.family == FeatureFamily::kChecksum)
        return std::get<ChecksumParams>(spec.params).count;
      if (spec.family == FeatureFamily::kNestedMagicChecksum)
        return std::get<NestedParams>(spec.params).count;
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<SweepAnnotation> default_sweeps() {
  std::vector<SweepAnnotation> sweeps;
  const auto add = [&](Parameter p, std::vector<std::string> programs,
                       std::vector<double> values) {
    sweeps.push_back({p, std::move(programs), std::move(values)});
  };

  const auto series = [](const char* fmt_prefix, const char* fmt_suffix,
                         std::initializer_list<int> vals) {
    std::vector<std::string> names;
    for (int v : vals)
      names.push_back(std::string(fmt_prefix) + std::to_string(v) +
                      fmt_suffix);
    return names;
  };
  const auto nums = [](std::initializer_list<int> vals) {
    return std::vector<double>(vals.begin(), vals.end());
  };

  add(Parameter::kDepth, series("COMP_W2_D", "_O2_B1", {1, 2, 3, 4, 5, 6}),
      nums({1, 2, 3, 4, 5, 6}));
  add(Parameter::kWidth, series("COMP_W", "_D2_O2_B1", {2, 3, 4, 5, 6}),
      nums({2, 3, 4, 5, 6}));
  add(Parameter::kWeight, series("COMWE_W2_D2_O", "_B1", {2, 3, 4, 6, 8}),
      nums({2, 3, 4, 6, 8}));
  add(Parameter::kBugBranch, series("COMP_W2_D4_O2_B", "", {1, 5, 9, 13, 16}),
      nums({1, 5, 9, 13, 16}));
  add(Parameter::kIteration,
      series("COML_I", "_DC0", {1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64}),
      nums({1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64}));
  // The data-constraint toggle is boolean; it is swept over its full domain,
  // paired across three iteration levels.
  add(Parameter::kDataConstraint,
      {"COML_I1_DC0", "COML_I1_DC1", "COML_I2_DC0", "COML_I2_DC1",
       "COML_I4_DC0", "COML_I4_DC1"},
      {0, 1, 0, 1, 0, 1});
  add(Parameter::kMagicStart, series("DMAG_S", "_L2", {0, 4, 8, 16, 32}),
      nums({0, 4, 8, 16, 32}));
  add(Parameter::kMagicLength, series("DMAG_S4_L", "", {1, 2, 3, 4, 6, 8}),
      nums({1, 2, 3, 4, 6, 8}));
  add(Parameter::kNestDepth, series("DNST_D", "_C1", {1, 2, 3, 4, 5}),
      nums({1, 2, 3, 4, 5}));
  add(Parameter::kChecksumCount,
      series("DCHK_C", "", {1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 14, 16}),
      nums({1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 14, 16}));

  return sweeps;
}

// --------------------------------------------------------------------------
// Manifest JSON.

namespace {

ordered_json params_to_json(const ProgramSpec& spec) {
  ordered_json j;
  switch (spec.family) {
    case FeatureFamily::kBranchTree:
    case FeatureFamily::kBranchWeight: {
      const auto& p = std::get<BranchTreeParams>(spec.params);
      j["width"] = p.width;
      j["depth"] = p.depth;
      j["weight"] = p.weight;
      j["bug_branch"] = p.bug_branch;
      break;
    }
    case FeatureFamily::kLoop:
    case FeatureFamily::kLoopDataConstraint: {
      const auto& p = std::get<LoopParams>(spec.params);
      j["kind"] = p.kind == LoopParams::Kind::kLoop ? "loop" : "recursion";
      j["iteration"] = p.iteration;
      j["has_data_constraint"] = p.has_data_constraint;
      break;
    }
    case FeatureFamily::kMagicBytes: {
      const auto& p = std::get<MagicBytesParams>(spec.params);
      j["start"] = p.start;
      j["length"] = p.length;
      break;
    }
    case FeatureFamily::kChecksum: {
      const auto& p = std::get<ChecksumParams>(spec.params);
      j["count"] = p.count;
      break;
    }
    case FeatureFamily::kNestedMagicChecksum: {
      const auto& p = std::get<NestedParams>(spec.params);
      j["depth"] = p.depth;
      j["count"] = p.count;
      break;
    }
  }
  return j;
}

FeatureParams params_from_json(FeatureFamily family, const ordered_json& j) {
  switch (family) {
    case FeatureFamily::kBranchTree:
    case FeatureFamily::kBranchWeight:
      return BranchTreeParams{j.at("width"), j.at("depth"), j.at("weight"),
                              j.at("bug_branch")};
    case FeatureFamily::kLoop:
    case FeatureFamily::kLoopDataConstraint: {
      LoopParams p;
      p.kind = j.at("kind") == "recursion" ? LoopParams::Kind::kRecursion
                                           : LoopParams::Kind::kLoop;
      p.iteration = j.at("iteration");
      p.has_data_constraint = j.at("has_data_constraint");
      return p;
    }
    case FeatureFamily::kMagicBytes:
      return MagicBytesParams{j.at("start"), j.at("length")};
    case FeatureFamily::kChecksum:
      return ChecksumParams{j.at("count")};
    case FeatureFamily::kNestedMagicChecksum:
      return NestedParams{j.at("depth"), j.at("count")};
  }
  throw Error("unknown feature family");
}

FeatureFamily family_from_string(const std::string& s) {
  for (const auto& fi : kFamilies) {
    if (s == fi.name) return fi.family;
  }
  throw Error("unknown feature family '" + s + "'");
}

}  // namespace

std::string grid_to_json(std::span<const ProgramSpec> grid) {
  ordered_json arr = ordered_json::array();
  for (const auto& spec : grid) {
    ordered_json j;
    j["name"] = spec.name();
    j["family"] = family_name(spec.family);
    j["params"] = params_to_json(spec);
    j["input_len"] = spec.input_len;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<ProgramSpec> grid_from_json(const std::string& text) {
  ordered_json arr = ordered_json::parse(text);
  if (!arr.is_array()) throw Error("grid manifest must be a JSON array");
  std::vector<ProgramSpec> grid;
  grid.reserve(arr.size());
  for (const auto& j : arr) {
    FeatureFamily family = family_from_string(j.at("family"));
    FeatureParams params = params_from_json(family, j.at("params"));
    ProgramSpec spec =
        ProgramSpec::make_with_len(family, params, j.at("input_len"));
    if (j.contains("name") && j.at("name") != spec.name())
      throw Error("grid manifest name mismatch: " +
                  j.at("name").get<std::string>() + " vs " + spec.name());
    grid.push_back(spec);
  }
  return grid;
}

std::string sweeps_to_json(std::span<const SweepAnnotation> sweeps) {
  ordered_json arr = ordered_json::array();
  for (const auto& sw : sweeps) {
    ordered_json j;
    j["parameter"] = parameter_code(sw.parameter);
    j["programs"] = sw.programs;
    j["values"] = sw.values;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<SweepAnnotation> sweeps_from_json(const std::string& text) {
  ordered_json arr = ordered_json::parse(text);
  std::vector<SweepAnnotation> sweeps;
  for (const auto& j : arr) {
    auto param = parameter_from_code(j.at("parameter"));
    if (!param)
      throw UnknownSweep("unknown parameter code " +
                         j.at("parameter").get<std::string>());
    SweepAnnotation sw;
    sw.parameter = *param;
    sw.programs = j.at("programs").get<std::vector<std::string>>();
    sw.values = j.at("values").get<std::vector<double>>();
    if (sw.programs.size() != sw.values.size())
      throw Error("sweep programs/values size mismatch");
    sweeps.push_back(std::move(sw));
  }
  return sweeps;
}

std::string grid_version(std::span<const ProgramSpec> grid) {
  uint64_t h = fnv1a64(grid_to_json(grid));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace featbench
