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
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace featbench::toml_lite {

// Reader for the TOML subset the config and adapter files use: comments,
// [table] headers (dotted allowed), and `key = value` lines with string,
// integer, float, boolean, or flat-array values. Keys flatten to
// "table.key". Multi-line values and inline tables are out of scope.

using Value = std::variant<std::string, int64_t, double, bool,
                           std::vector<std::string>, std::vector<int64_t>,
                           std::vector<double>>;
using Table = std::map<std::string, Value>;

// Throws ConfigError with a line number on malformed input.
Table parse(const std::string& text);

std::optional<std::string> get_string(const Table& t, const std::string& key);
std::optional<int64_t> get_int(const Table& t, const std::string& key);
std::optional<double> get_double(const Table& t, const std::string& key);
std::optional<bool> get_bool(const Table& t, const std::string& key);
std::optional<std::vector<std::string>> get_string_array(
    const Table& t, const std::string& key);

std::string require_string(const Table& t, const std::string& key);

// Serialization for provenance copies.
std::string escape_string(const std::string& s);

}  // namespace featbench::toml_lite
