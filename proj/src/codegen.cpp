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

#include "featbench/codegen.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "featbench/mixer.hpp"
#include "featbench/target_layout.hpp"

namespace featbench {

using ordered_json = nlohmann::ordered_json;

std::string bug_marker_for(const std::string& program_name) {
  return "FB_BUG:" + program_name;
}

namespace {

std::string hex_byte(uint8_t b) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "0x%02xu", b);
  return buf;
}

std::string indent(int levels) { return std::string(4 * levels, ' '); }

// Shared scaffolding around the per-family check function. The check is a
// pure predicate over the input bytes so the same logic backs the one-shot
// mode, trace mode and the persistent serve protocol.
std::string file_header(const ProgramSpec& spec, bool with_markers) {
  std::ostringstream os;
  os << "/* featbench generated target: " << spec.name() << "\n"
     << " * family: " << family_name(spec.family)
     << "   input bytes: " << spec.input_len << "\n"
     << " *\n"
     << " * Modes:\n"
     << " *   default            read input from argv[1] (file) or stdin;\n"
     << " *                      abort() on the planted bug, exit 0 "
        "otherwise\n"
     << " *   FEATBENCH_TRACE=1  also print branch markers on stdout\n"
     << " *   FEATBENCH_SERVE=1  persistent harness: 4-byte LE length plus\n"
     << " *                      payload per input on stdin, one status "
        "byte\n"
     << " *                      (0 clean / 1 bug path) per input on stdout\n"
     << " */\n"
     << "#define _POSIX_C_SOURCE 200809L\n"
     << "\n"
     << "#include <stdint.h>\n"
     << "#include <stdio.h>\n"
     << "#include <stdlib.h>\n"
     << "#include <string.h>\n"
     << "#include <unistd.h>\n"
     << "\n"
     << "#define FB_INPUT_CAP " << spec.input_len << "u\n"
     << "\n"
     << "static int fb_trace = 0;\n"
     << "\n";
  if (with_markers) {
    os << "static void fb_mark(const char *line)\n"
       << "{\n"
       << "    if (fb_trace) {\n"
       << "        fputs(line, stdout);\n"
       << "        fputc('\\n', stdout);\n"
       << "        fflush(stdout);\n"
       << "    }\n"
       << "}\n"
       << "\n";
  }
  return os.str();
}

std::string file_trailer(const ProgramSpec& spec, const std::string& marker) {
  std::ostringstream os;
  os << "static void fb_bug(void)\n"
     << "{\n"
     << "    fputs(\"" << marker << "\\n\", stderr);\n"
     << "    fflush(stderr);\n"
     << "    abort(); /* the planted fault */\n"
     << "}\n"
     << "\n"
     << "static int fb_read_exact(unsigned char *p, size_t n)\n"
     << "{\n"
     << "    size_t off = 0;\n"
     << "    while (off < n) {\n"
     << "        ssize_t r = read(0, p + off, n - off);\n"
     << "        if (r <= 0) return -1;\n"
     << "        off += (size_t)r;\n"
     << "    }\n"
     << "    return 0;\n"
     << "}\n"
     << "\n"
     << "static int fb_serve(void)\n"
     << "{\n"
     << "    unsigned char buf[FB_INPUT_CAP];\n"
     << "    unsigned char hdr[4];\n"
     << "    unsigned char drain[256];\n"
     << "    for (;;) {\n"
     << "        ssize_t r = read(0, hdr, 1);\n"
     << "        unsigned char status;\n"
     << "        uint32_t len, use, left;\n"
     << "        if (r == 0) return 0; /* end of stream */\n"
     << "        if (r != 1 || fb_read_exact(hdr + 1, 3) != 0) return 3;\n"
     << "        len = (uint32_t)hdr[0] | ((uint32_t)hdr[1] << 8) |\n"
     << "              ((uint32_t)hdr[2] << 16) | ((uint32_t)hdr[3] << "
        "24);\n"
     << "        memset(buf, 0, sizeof buf);\n"
     << "        use = len < FB_INPUT_CAP ? len : FB_INPUT_CAP;\n"
     << "        if (fb_read_exact(buf, use) != 0) return 3;\n"
     << "        left = len - use;\n"
     << "        while (left > 0) {\n"
     << "            uint32_t step =\n"
     << "                left < sizeof drain ? left : (uint32_t)sizeof "
        "drain;\n"
     << "            if (fb_read_exact(drain, step) != 0) return 3;\n"
     << "            left -= step;\n"
     << "        }\n"
     << "        status = fb_check(buf, use) ? 1u : 0u;\n"
     << "        if (write(1, &status, 1) != 1) return 3;\n"
     << "    }\n"
     << "}\n"
     << "\n"
     << "int main(int argc, char **argv)\n"
     << "{\n"
     << "    const char *env;\n"
     << "    unsigned char buf[FB_INPUT_CAP];\n"
     << "    size_t n = 0;\n"
     << "\n"
     << "    env = getenv(\"FEATBENCH_SERVE\");\n"
     << "    if (env != NULL && env[0] == '1') return fb_serve();\n"
     << "    env = getenv(\"FEATBENCH_TRACE\");\n"
     << "    fb_trace = (env != NULL && env[0] == '1');\n"
     << "\n"
     << "    memset(buf, 0, sizeof buf);\n"
     << "    if (argc > 1) {\n"
     << "        FILE *f = fopen(argv[1], \"rb\");\n"
     << "        if (f == NULL) {\n"
     << "            fprintf(stderr, \"cannot open input file: %s\\n\", "
        "argv[1]);\n"
     << "            return 2;\n"
     << "        }\n"
     << "        n = fread(buf, 1, sizeof buf, f);\n"
     << "        fclose(f);\n"
     << "    } else {\n"
     << "        n = fread(buf, 1, sizeof buf, stdin);\n"
     << "    }\n"
     << "    if (fb_check(buf, n)) fb_bug();\n"
     << "    return 0;\n"
     << "}\n";
  (void)spec;
  return os.str();
}

SourceUnit assemble(const ProgramSpec& spec, const std::string& body,
                    bool with_markers = false) {
  SourceUnit unit;
  unit.spec = spec;
  unit.bug_marker = bug_marker_for(spec.name());
  unit.entry_symbol = spec.name();
  unit.code = file_header(spec, with_markers) + body + "\n" +
              file_trailer(spec, unit.bug_marker);
  return unit;
}

std::string add16_helper() {
  return std::string() +
         "static uint32_t fb_add16(const unsigned char *p)\n" +
         "{\n" +
         "    uint32_t sum = 0;\n" +
         "    int i;\n" +
         "    for (i = 0; i < 16; i++) sum = (sum + p[i]) & 0xffffu;\n" +
         "    return sum;\n" +
         "}\n" +
         "\n" +
         "static uint32_t fb_le16(const unsigned char *p)\n" +
         "{\n" +
         "    return (uint32_t)p[0] | ((uint32_t)p[1] << 8);\n" +
         "}\n" +
         "\n";
}

std::string checksum_condition(uint32_t data_off) {
  std::ostringstream os;
  os << "fb_add16(in + " << data_off << "u) == fb_le16(in + "
     << data_off + kChecksumRegionBytes << "u)";
  return os.str();
}

// ---- branch trees ---------------------------------------------------------

struct TreeEmitter {
  const BranchTreeParams& p;
  uint32_t bug_leaf;
  std::vector<uint32_t> bug_digits;
  std::ostringstream out;

  // Leaves are numbered left to right; child i at level k owns a block of
  // width^(depth-k) consecutive leaves.
  uint64_t block_span(uint32_t level) const {
    uint64_t span = 1;
    for (uint32_t k = level; k < p.depth; ++k) span *= p.width;
    return span;
  }

  void emit_leaf(uint64_t leaf_base, int depth_in) {
    uint64_t leaf = leaf_base + 1;
    out << indent(depth_in) << "fb_mark(\"This is branch " << leaf
        << "\");\n";
    if (leaf == bug_leaf) {
      out << indent(depth_in) << "return 1; /* planted bug */\n";
    } else {
      out << indent(depth_in) << "return 0;\n";
    }
  }

  void emit_child(uint32_t level, uint64_t leaf_base, uint32_t child,
                  bool on_path, int depth_in) {
    uint64_t child_base = leaf_base + child * block_span(level);
    bool child_on_path = on_path && child == bug_digits[level - 1];
    emit_node(level + 1, child_base, child_on_path, depth_in);
  }

  void emit_node(uint32_t level, uint64_t leaf_base, bool on_path,
                 int depth_in) {
    if (level > p.depth) {
      emit_leaf(leaf_base, depth_in);
      return;
    }
    uint32_t w1 = p.width - 1;
    // The privileged child (taken with probability 1/weight) is the one on
    // the path to the buggy leaf; off that path it is child 0.
    uint32_t priv = on_path ? bug_digits[level - 1] : 0;
    std::string u = "u" + std::to_string(level);

    out << indent(depth_in) << "if (" << u << " < " << w1 << "u) {\n";
    emit_child(level, leaf_base, priv, on_path, depth_in + 1);
    out << indent(depth_in) << "} else {\n";
    if (p.width == 2) {
      emit_child(level, leaf_base, 1 - priv, on_path, depth_in + 1);
    } else {
      out << indent(depth_in + 1) << "switch ((" << u << " - " << w1
          << "u) % " << w1 << "u) {\n";
      for (uint32_t j = 0; j < w1; ++j) {
        uint32_t child = j < priv ? j : j + 1;
        if (j + 1 < w1) {
          out << indent(depth_in + 1) << "case " << j << "u:\n";
        } else {
          out << indent(depth_in + 1) << "default:\n";
        }
        emit_child(level, leaf_base, child, on_path, depth_in + 2);
      }
      out << indent(depth_in + 1) << "}\n";
    }
    out << indent(depth_in) << "}\n";
  }
};

}  // namespace

std::vector<uint32_t> bug_path_digits(const BranchTreeParams& p) {
  std::vector<uint32_t> digits(p.depth);
  uint64_t rest = p.bug_branch - 1;
  for (uint32_t k = p.depth; k >= 1; --k) {
    digits[k - 1] = static_cast<uint32_t>(rest % p.width);
    rest /= p.width;
  }
  return digits;
}

uint32_t route_leaf(const BranchTreeParams& p, uint32_t hash) {
  const auto bug_digits = bug_path_digits(p);
  uint64_t m = uint64_t{p.weight} * (p.width - 1);
  uint64_t rem = hash;
  bool on_path = true;
  uint64_t leaf = 0;
  for (uint32_t level = 1; level <= p.depth; ++level) {
    uint32_t u = static_cast<uint32_t>(rem % m);
    rem /= m;
    uint32_t priv = on_path ? bug_digits[level - 1] : 0;
    uint32_t child;
    if (u < p.width - 1) {
      child = priv;
    } else {
      uint32_t j = (u - (p.width - 1)) % (p.width - 1);
      child = j < priv ? j : j + 1;
    }
    on_path = on_path && child == bug_digits[level - 1];
    leaf = leaf * p.width + child;
  }
  return static_cast<uint32_t>(leaf + 1);
}

SourceUnit emit_branch_tree(const ProgramSpec& spec) {
  if (spec.family != FeatureFamily::kBranchTree &&
      spec.family != FeatureFamily::kBranchWeight)
    throw InvalidSpec("emit_branch_tree: not a branch-tree family");
  validate(spec);
  const auto& p = std::get<BranchTreeParams>(spec.params);

  uint64_t m = uint64_t{p.weight} * (p.width - 1);
  std::ostringstream body;
  body << "/* A full " << p.width << "-ary conditional nest of depth "
       << p.depth << ". Selectors are base-" << m
       << " digits of the input\n"
       << " * hash; a digit below " << p.width - 1
       << " follows the edge toward branch " << p.bug_branch
       << " (probability 1/" << p.weight << "\n"
       << " * per level), the remaining digits spread uniformly over the "
          "other children. */\n";
  body << "static int " << spec.name() << "(uint32_t hash)\n{\n";
  uint64_t divisor = 1;
  for (uint32_t level = 1; level <= p.depth; ++level) {
    body << "    const uint32_t u" << level << " = (uint32_t)(((uint64_t)hash"
         << " / " << divisor << "ull) % " << m << "u);\n";
    divisor *= m;
  }
  body << "\n";

  TreeEmitter emitter{p, p.bug_branch, bug_path_digits(p), {}};
  emitter.emit_node(1, 0, true, 1);
  body << emitter.out.str();
  body << "}\n\n";

  body << "static int fb_check(const unsigned char *in, size_t n)\n"
       << "{\n"
       << "    uint32_t hash = (uint32_t)in[0] | ((uint32_t)in[1] << 8) |\n"
       << "                    ((uint32_t)in[2] << 16) | ((uint32_t)in[3] << "
          "24);\n"
       << "    (void)n;\n"
       << "    return " << spec.name() << "(hash);\n"
       << "}\n";
  return assemble(spec, body.str(), /*with_markers=*/true);
}

SourceUnit emit_loop(const ProgramSpec& spec) {
  if (spec.family != FeatureFamily::kLoop &&
      spec.family != FeatureFamily::kLoopDataConstraint)
    throw InvalidSpec("emit_loop: not a loop family");
  validate(spec);
  const auto& p = std::get<LoopParams>(spec.params);
  bool constrained = p.has_data_constraint;

  std::ostringstream body;
  if (constrained) {
    body << "/* The bug sits behind " << p.iteration
         << " occurrence(s) of the sentinel byte "
         << hex_byte(kLoopSentinel) << ". */\n";
  } else {
    body << "/* The bug sits behind " << p.iteration
         << " pass(es); every input byte drives one pass. */\n";
  }

  const std::string hit = "if (counter == " + std::to_string(p.iteration) +
                          "ul) return 1; /* planted bug */";

  if (p.kind == LoopParams::Kind::kLoop) {
    body << "static int " << spec.name()
         << "(const unsigned char *in, size_t n)\n"
         << "{\n"
         << "    unsigned long counter = 0;\n"
         << "    size_t i;\n";
    if (!constrained) body << "    (void)in;\n";
    body << "    for (i = 0; i < n; i++) {\n";
    if (constrained) {
      body << "        if (in[i] == " << hex_byte(kLoopSentinel) << ") {\n"
           << "            counter++;\n"
           << "            " << hit << "\n"
           << "        }\n";
    } else {
      body << "        counter++;\n"
           << "        " << hit << "\n";
    }
    body << "    }\n"
         << "    return 0;\n"
         << "}\n\n";
  } else {
    body << "/* One recursive call per input byte. */\n"
         << "static int fb_walk(const unsigned char *in, size_t n, size_t "
            "i,\n"
         << "                   unsigned long counter)\n"
         << "{\n"
         << "    if (i >= n) return 0;\n";
    if (constrained) {
      body << "    if (in[i] == " << hex_byte(kLoopSentinel)
           << ") counter++;\n";
    } else {
      body << "    counter++;\n";
    }
    body << "    " << hit << "\n"
         << "    return fb_walk(in, n, i + 1, counter);\n"
         << "}\n"
         << "\n"
         << "static int " << spec.name()
         << "(const unsigned char *in, size_t n)\n"
         << "{\n"
         << "    return fb_walk(in, n, 0, 0ul);\n"
         << "}\n\n";
  }

  body << "static int fb_check(const unsigned char *in, size_t n)\n"
       << "{\n"
       << "    return " << spec.name() << "(in, n);\n"
       << "}\n";
  return assemble(spec, body.str());
}

SourceUnit emit_magic(const ProgramSpec& spec) {
  if (spec.family != FeatureFamily::kMagicBytes)
    throw InvalidSpec("emit_magic: not the magic-bytes family");
  validate(spec);
  const auto& p = std::get<MagicBytesParams>(spec.params);
  auto magic = magic_bytes_for(spec.name(), p.length);

  std::ostringstream body;
  body << "/* The guarded region must equal these " << p.length
       << " byte(s), derived from the\n"
       << " * program name (never 0x00 or 0x0a). */\n"
       << "static const unsigned char fb_magic[" << p.length << "] = {";
  for (size_t i = 0; i < magic.size(); ++i) {
    if (i % 8 == 0) body << "\n    ";
    body << hex_byte(magic[i]) << (i + 1 < magic.size() ? ", " : ",");
  }
  body << "\n};\n\n";

  body << "static int " << spec.name()
       << "(const unsigned char *in, size_t n)\n"
       << "{\n"
       << "    if (n < " << p.start + p.length << "u) return 0;\n"
       << "    if (memcmp(in + " << p.start << "u, fb_magic, " << p.length
       << "u) != 0) return 0;\n"
       << "    return 1; /* planted bug */\n"
       << "}\n\n";

  body << "static int fb_check(const unsigned char *in, size_t n)\n"
       << "{\n"
       << "    return " << spec.name() << "(in, n);\n"
       << "}\n";
  return assemble(spec, body.str());
}

SourceUnit emit_checksum(const ProgramSpec& spec) {
  if (spec.family != FeatureFamily::kChecksum)
    throw InvalidSpec("emit_checksum: not the checksum family");
  validate(spec);
  const auto& p = std::get<ChecksumParams>(spec.params);
  uint32_t layout = p.count * kChecksumTestBytes;

  std::ostringstream body;
  body << "/* " << p.count
       << " nested checksum test(s): each guards a 16-byte region whose\n"
       << " * 16-bit byte sum must match the 2-byte little-endian value "
          "behind it. */\n";
  body << add16_helper();
  body << "static int " << spec.name()
       << "(const unsigned char *in, size_t n)\n"
       << "{\n"
       << "    if (n < " << layout << "u) return 0;\n";
  for (uint32_t j = 0; j < p.count; ++j) {
    body << indent(static_cast<int>(j) + 1) << "if ("
         << checksum_condition(j * kChecksumTestBytes) << ") {\n";
  }
  body << indent(static_cast<int>(p.count) + 1)
       << "return 1; /* planted bug */\n";
  for (uint32_t j = p.count; j > 0; --j) {
    body << indent(static_cast<int>(j)) << "}\n";
  }
  body << "    return 0;\n"
       << "}\n\n";

  body << "static int fb_check(const unsigned char *in, size_t n)\n"
       << "{\n"
       << "    return " << spec.name() << "(in, n);\n"
       << "}\n";
  return assemble(spec, body.str());
}

SourceUnit emit_nested(const ProgramSpec& spec) {
  if (spec.family != FeatureFamily::kNestedMagicChecksum)
    throw InvalidSpec("emit_nested: not the nested family");
  validate(spec);
  const auto& p = std::get<NestedParams>(spec.params);
  uint32_t magic_levels = p.depth - p.count;
  auto magic = magic_bytes_for(spec.name(),
                               size_t{magic_levels} * kNestedMagicBytes);
  uint32_t layout = kNestedBaseOffset + magic_levels * kNestedMagicBytes +
                    p.count * kChecksumTestBytes;

  std::ostringstream body;
  body << "/* " << p.depth << " nested condition level(s): "
       << magic_levels << " two-byte magic test(s) wrapping " << p.count
       << "\n * checksum test(s); the fault sits at the innermost level. "
          "*/\n";
  if (p.count > 0) body << add16_helper();

  body << "static int " << spec.name()
       << "(const unsigned char *in, size_t n)\n"
       << "{\n"
       << "    if (n < " << layout << "u) return 0;\n";
  int depth_in = 1;
  uint32_t off = kNestedBaseOffset;
  for (uint32_t lvl = 0; lvl < magic_levels; ++lvl) {
    body << indent(depth_in) << "if (in[" << off << "] == "
         << hex_byte(magic[size_t{lvl} * 2]) << " && in[" << off + 1
         << "] == " << hex_byte(magic[size_t{lvl} * 2 + 1]) << ") {\n";
    off += kNestedMagicBytes;
    ++depth_in;
  }
  for (uint32_t j = 0; j < p.count; ++j) {
    body << indent(depth_in) << "if (" << checksum_condition(off) << ") {\n";
    off += kChecksumTestBytes;
    ++depth_in;
  }
  body << indent(depth_in) << "return 1; /* planted bug */\n";
  for (; depth_in > 1; --depth_in) {
    body << indent(depth_in - 1) << "}\n";
  }
  body << "    return 0;\n"
       << "}\n\n";

  body << "static int fb_check(const unsigned char *in, size_t n)\n"
       << "{\n"
       << "    return " << spec.name() << "(in, n);\n"
       << "}\n";
  return assemble(spec, body.str());
}

SourceUnit emit_source(const ProgramSpec& spec) {
  switch (spec.family) {
    case FeatureFamily::kBranchTree:
    case FeatureFamily::kBranchWeight:
      return emit_branch_tree(spec);
    case FeatureFamily::kLoop:
    case FeatureFamily::kLoopDataConstraint:
      return emit_loop(spec);
    case FeatureFamily::kMagicBytes:
      return emit_magic(spec);
    case FeatureFamily::kChecksum:
      return emit_checksum(spec);
    case FeatureFamily::kNestedMagicChecksum:
      return emit_nested(spec);
  }
  throw Error("unknown feature family");
}

namespace {

constexpr const char* kBuildScript =
    "#!/bin/sh\n"
    "# Compile every featbench target in programs/ into bin/.\n"
    "set -e\n"
    "cd \"$(dirname \"$0\")\"\n"
    "CC=\"${CC:-cc}\"\n"
    "mkdir -p bin\n"
    "for src in programs/*.c; do\n"
    "    name=\"$(basename \"$src\" .c)\"\n"
    "    \"$CC\" -std=c99 -O1 -o \"bin/$name\" \"$src\"\n"
    "done\n"
    "echo \"built $(ls bin | wc -l) targets\"\n";

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw Error("short write to " + path.string());
}

}  // namespace

std::string manifest_to_json(std::span<const TargetInfo> targets) {
  ordered_json obj = ordered_json::object();
  for (const auto& t : targets) {
    ordered_json j;
    j["file"] = t.file;
    j["input_len"] = t.input_len;
    j["bug_marker"] = t.bug_marker;
    obj[t.name] = std::move(j);
  }
  return obj.dump(2) + "\n";
}

std::vector<TargetInfo> manifest_from_json(const std::string& text) {
  ordered_json obj = ordered_json::parse(text);
  std::vector<TargetInfo> targets;
  for (const auto& [name, j] : obj.items()) {
    TargetInfo t;
    t.name = name;
    t.file = j.at("file");
    t.input_len = j.at("input_len");
    t.bug_marker = j.at("bug_marker");
    targets.push_back(std::move(t));
  }
  return targets;
}

std::vector<TargetInfo> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return manifest_from_json(ss.str());
}

EmitReport emit_all(std::span<const ProgramSpec> grid,
                    const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "programs");

  EmitReport report;
  std::vector<TargetInfo> targets;
  for (const auto& spec : grid) {
    std::string name = spec.name();
    try {
      SourceUnit unit = emit_source(spec);
      std::string rel = "programs/" + name + ".c";
      write_file(out_dir / rel, unit.code);
      targets.push_back({name, rel, spec.input_len, unit.bug_marker});
      report.written.push_back(name);
    } catch (const Error& e) {
      report.errors.push_back({name, e.what()});
    }
  }

  report.manifest_path = out_dir / "manifest.json";
  write_file(report.manifest_path, manifest_to_json(targets));
  write_file(out_dir / "build.sh", kBuildScript);
  fs::permissions(out_dir / "build.sh",
                  fs::perms::owner_exec | fs::perms::group_exec |
                      fs::perms::others_exec,
                  fs::perm_options::add);
  return report;
}

}  // namespace featbench
