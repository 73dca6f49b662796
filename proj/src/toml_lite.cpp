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

#include "featbench/toml_lite.hpp"

#include <charconv>
#include <sstream>

#include "featbench/errors.hpp"

namespace featbench::toml_lite {

namespace {

[[noreturn]] void fail(int line, const std::string& why) {
  throw ConfigError("toml line " + std::to_string(line) + ": " + why);
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Strips a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& s) {
  bool in_string = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return key.front() != '.' && key.back() != '.';
}

std::string parse_string_literal(const std::string& raw, int line) {
  if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"')
    fail(line, "expected a double-quoted string");
  std::string out;
  for (size_t i = 1; i + 1 < raw.size(); ++i) {
    char c = raw[i];
    if (c != '\\') {
      out.push_back(c);
      continue;
    }
    if (i + 2 >= raw.size() + 1) fail(line, "dangling escape");
    char e = raw[++i];
    switch (e) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case 'r': out.push_back('\r'); break;
      case '"': out.push_back('"'); break;
      case '\\': out.push_back('\\'); break;
      default: fail(line, std::string("unsupported escape \\") + e);
    }
  }
  return out;
}

std::vector<std::string> split_array_items(const std::string& inner,
                                           int line) {
  std::vector<std::string> items;
  std::string cur;
  bool in_string = false;
  for (size_t i = 0; i < inner.size(); ++i) {
    char c = inner[i];
    if (c == '"' && (i == 0 || inner[i - 1] != '\\')) in_string = !in_string;
    if (c == ',' && !in_string) {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (in_string) fail(line, "unterminated string in array");
  std::string last = trim(cur);
  if (!last.empty()) items.push_back(last);
  return items;
}

Value parse_scalar(const std::string& raw, int line) {
  if (!raw.empty() && raw.front() == '"')
    return parse_string_literal(raw, line);
  if (raw == "true") return true;
  if (raw == "false") return false;
  // integer?
  {
    int64_t v = 0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec == std::errc{} && ptr == raw.data() + raw.size()) return v;
  }
  {
    try {
      size_t used = 0;
      double v = std::stod(raw, &used);
      if (used == raw.size()) return v;
    } catch (...) {
    }
  }
  fail(line, "cannot parse value '" + raw + "'");
}

Value parse_value(const std::string& raw, int line) {
  if (!raw.empty() && raw.front() == '[') {
    if (raw.back() != ']') fail(line, "unterminated array");
    auto items = split_array_items(raw.substr(1, raw.size() - 2), line);
    if (items.empty()) return std::vector<std::string>{};
    std::vector<Value> scalars;
    bool any_string = false, any_double = false, any_bool = false;
    for (const auto& item : items) {
      Value v = parse_scalar(item, line);
      any_string |= std::holds_alternative<std::string>(v);
      any_double |= std::holds_alternative<double>(v);
      any_bool |= std::holds_alternative<bool>(v);
      scalars.push_back(std::move(v));
    }
    if (any_bool) fail(line, "boolean arrays are not supported");
    if (any_string) {
      std::vector<std::string> out;
      for (const auto& v : scalars) {
        if (!std::holds_alternative<std::string>(v))
          fail(line, "mixed array element types");
        out.push_back(std::get<std::string>(v));
      }
      return out;
    }
    if (any_double) {
      std::vector<double> out;
      for (const auto& v : scalars)
        out.push_back(std::holds_alternative<double>(v)
                          ? std::get<double>(v)
                          : static_cast<double>(std::get<int64_t>(v)));
      return out;
    }
    std::vector<int64_t> out;
    for (const auto& v : scalars) out.push_back(std::get<int64_t>(v));
    return out;
  }
  return parse_scalar(raw, line);
}

}  // namespace

Table parse(const std::string& text) {
  Table table;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(lineno, "unterminated table header");
      section = trim(s.substr(1, s.size() - 2));
      if (!valid_key(section)) fail(lineno, "bad table name '" + section + "'");
      continue;
    }
    size_t eq = std::string::npos;
    bool in_string = false;
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
      if (s[i] == '=' && !in_string) {
        eq = i;
        break;
      }
    }
    if (eq == std::string::npos) fail(lineno, "expected key = value");
    std::string key = trim(s.substr(0, eq));
    if (!valid_key(key)) fail(lineno, "bad key '" + key + "'");
    std::string full_key = section.empty() ? key : section + "." + key;
    if (table.count(full_key)) fail(lineno, "duplicate key " + full_key);
    table[full_key] = parse_value(trim(s.substr(eq + 1)), lineno);
  }
  return table;
}

std::optional<std::string> get_string(const Table& t, const std::string& key) {
  auto it = t.find(key);
  if (it == t.end()) return std::nullopt;
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  throw ConfigError("config key " + key + " must be a string");
}

std::optional<int64_t> get_int(const Table& t, const std::string& key) {
  auto it = t.find(key);
  if (it == t.end()) return std::nullopt;
  if (const auto* v = std::get_if<int64_t>(&it->second)) return *v;
  throw ConfigError("config key " + key + " must be an integer");
}

std::optional<double> get_double(const Table& t, const std::string& key) {
  auto it = t.find(key);
  if (it == t.end()) return std::nullopt;
  if (const auto* v = std::get_if<double>(&it->second)) return *v;
  if (const auto* v = std::get_if<int64_t>(&it->second))
    return static_cast<double>(*v);
  throw ConfigError("config key " + key + " must be a number");
}

std::optional<bool> get_bool(const Table& t, const std::string& key) {
  auto it = t.find(key);
  if (it == t.end()) return std::nullopt;
  if (const auto* v = std::get_if<bool>(&it->second)) return *v;
  throw ConfigError("config key " + key + " must be a boolean");
}

std::optional<std::vector<std::string>> get_string_array(
    const Table& t, const std::string& key) {
  auto it = t.find(key);
  if (it == t.end()) return std::nullopt;
  if (const auto* v = std::get_if<std::vector<std::string>>(&it->second))
    return *v;
  throw ConfigError("config key " + key + " must be an array of strings");
}

std::string require_string(const Table& t, const std::string& key) {
  auto v = get_string(t, key);
  if (!v) throw ConfigError("config key " + key + " is required");
  return *v;
}

std::string escape_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out += "\"";
  return out;
}

}  // namespace featbench::toml_lite
