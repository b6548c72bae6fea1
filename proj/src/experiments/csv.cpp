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

#include "collspin/experiments/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "collspin/types.hpp"

namespace collspin::experiments {

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw InvalidArgument("table " + name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                          std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

namespace {

int compare(const Cell& a, const Cell& b) {
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  return std::visit(
      [&](const auto& x) -> int {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b);
        return x < y ? -1 : (y < x ? 1 : 0);
      },
      a);
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return quote(std::get<std::string>(c));
}

}  // namespace

void ResultTable::sort_rows() {
  const std::size_t k = std::min(key_columns, columns.size());
  std::stable_sort(rows.begin(), rows.end(), [k](const auto& a, const auto& b) {
    for (std::size_t i = 0; i < k; ++i) {
      const int c = compare(a[i], b[i]);
      if (c != 0) return c < 0;
    }
    return false;
  });
}

void ResultTable::check_finite() const {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (const auto* d = std::get_if<double>(&rows[r][c]); d && !std::isfinite(*d)) {
        throw NumericalError("table " + name + ": non-finite value in column '" + columns[c] + "' at row " +
                             std::to_string(r));
      }
    }
  }
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string render_csv(const ResultTable& table, const Provenance& p) {
  std::string out;
  out += "# engine: collspin " + p.engine_version + "\n";
  out += "# scenario: " + p.scenario + "\n";
  out += "# kind: " + p.kind + "\n";
  out += "# table: " + table.name + "\n";
  if (!table.description.empty()) out += "# description: " + table.description + "\n";
  out += "# config_hash: fnv1a64:" + p.config_hash + "\n";
  out += "# tolerances: " + p.tolerances + "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) out += (c ? "," : "") + quote(table.columns[c]);
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += render_cell(row[c]);
    }
    out += "\n";
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot rename " + tmp.string() + " to " + path.string());
  }
}

}  // namespace collspin::experiments
