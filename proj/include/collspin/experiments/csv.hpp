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

// Result tables and their CSV serialization.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace collspin::experiments {

using Cell = std::variant<double, std::int64_t, std::string>;

struct ResultTable {
  std::string name;  // file stem
  std::string description;
  std::vector<std::string> columns;
  /// Rows are sorted by this many leading columns before writing.
  std::size_t key_columns = 1;
  std::vector<std::vector<Cell>> rows;
  /// Free-form metadata copied into the manifest (case label, control, ...).
  nlohmann::json meta = nlohmann::json::object();
  /// Suggested plot axes for downstream renderers.
  std::string x;
  std::vector<std::string> y;

  void add_row(std::vector<Cell> row);
  void sort_rows();
  /// Throws NumericalError naming the first NaN or infinite cell.
  void check_finite() const;
};

struct Provenance {
  std::string scenario;
  std::string kind;
  std::string config_hash;
  std::string engine_version;
  std::string tolerances;
};

/// 17 significant digits ("%.17g"), enough to read back the same double.
std::string format_number(double value);

/// '#'-prefixed provenance lines, a header row, then one line per row, LF
/// terminated.
std::string render_csv(const ResultTable& table, const Provenance& provenance);

/// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace collspin::experiments
