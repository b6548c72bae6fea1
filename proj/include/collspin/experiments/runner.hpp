// Copyright 2026 The collspin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Executes a scenario config and writes its tables and manifest.

#pragma once

#include <filesystem>
#include <vector>

#include "collspin/experiments/config.hpp"
#include "collspin/experiments/csv.hpp"

namespace collspin::experiments {

/// Computes every table of a scenario without touching the filesystem. Rows
/// are sorted and checked for NaN/Inf.
std::vector<ResultTable> compute_tables(const ScenarioConfig& config, unsigned threads = 0);

struct RunOptions {
  std::filesystem::path out_root = "out";
  unsigned threads = 0;
};

struct RunResult {
  std::filesystem::path directory;
  std::vector<std::filesystem::path> files;
  std::filesystem::path manifest;
};

/// compute_tables, then writes <out_root>/<output or name>/ with one CSV per
/// table, the normalized config and manifest.json. Nothing is written when a
/// table fails its finiteness check.
RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options);

/// Engine version string embedded in outputs.
std::string engine_version();

}  // namespace collspin::experiments
