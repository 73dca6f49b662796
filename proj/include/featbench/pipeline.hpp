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

#include <iosfwd>

#include "featbench/config.hpp"

namespace featbench {

// Pipeline stages behind the CLI subcommands. Each stage is independently
// invokable, idempotent for fixed seeds, and returns 0 on success or 1 on
// partial failure; configuration problems throw ConfigError (exit 2 at the
// CLI).
int cmd_generate(const PipelineConfig& config, std::ostream& out);
int cmd_build(const PipelineConfig& config, std::ostream& out);
int cmd_validate(const PipelineConfig& config, std::ostream& out);
int cmd_run(const PipelineConfig& config, std::ostream& out);
int cmd_analyze(const PipelineConfig& config, std::ostream& out);

// Tool version plus the default grid's manifest fingerprint.
std::string version_string();

}  // namespace featbench
