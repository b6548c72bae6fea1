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

// Scenario configuration: a strict JSON schema with dotted-path overrides.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "collspin/metrology.hpp"
#include "collspin/phase_space.hpp"

namespace collspin::experiments {

using nlohmann::json;

enum class ScenarioKind {
  husimi_oat,
  husimi_tat,
  qfi_curve,
  gain_curve,
  n_scan,
  control_sweep,
  qcrb_curve,
  qcrb_control,
  bloch_single,
  matrix_movie,
};

std::string to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(std::string_view text);

/// Raised with every schema diagnostic found in one pass.
class ConfigError : public InvalidArgument {
 public:
  explicit ConfigError(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  std::vector<double> points() const;
};

struct CaseSpec {
  std::string label;
  std::vector<NoiseChannelSpec> channels;
};

struct ControlSpec {
  ControlKind kind = ControlKind::linear_jx;
  std::vector<double> chi;
};

enum class ParameterSet { none, field_z, field_xyz };

struct HamiltonianConfig {
  ParameterSet parameters = ParameterSet::field_z;
  std::vector<double> nominal = {0.0};
  std::vector<HamiltonianTerm> terms;

  HamiltonianSpec build() const;
};

struct Tolerances {
  double rtol = 1e-8;
  double atol = 1e-10;
  double eigen_cutoff = kDefaultEigenCutoff;
  double pinv_cutoff = 1e-10;
};

struct HusimiConfig {
  SphereGridSpec grid;
  std::vector<double> chi_t;
  /// husimi_tat only: grid searched for the multi-GHZ time, which is appended
  /// to the panels.
  std::optional<GridSpec> search;
};

struct ScenarioConfig {
  std::string name;
  ScenarioKind kind = ScenarioKind::qfi_curve;
  std::string description;
  std::string provenance;
  int n_spins = 2;
  std::optional<Representation> representation;  // "auto" when empty
  ProbeSpec probe;
  HamiltonianConfig hamiltonian;
  std::vector<CaseSpec> cases;
  std::vector<ControlSpec> controls;
  GridSpec time_grid{0.05, 15.0, 0.05};
  std::vector<int> n_list;
  double integration_t_max = 50.0;
  std::array<std::array<double, 3>, 3> weight{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  int repetitions = 1;
  HusimiConfig husimi;
  std::vector<double> snapshot_times;
  std::string output;  // subdirectory of the output root; defaults to name
  Tolerances tolerances;

  IntegratorOptions integrator() const;
  /// Problem for one case with an optional control term.
  SensingProblem problem(const CaseSpec& c, std::optional<std::pair<ControlKind, double>> control = {}) const;
};

/// Parses a config object. Unknown keys, wrong types and missing required
/// fields are all reported together through ConfigError.
ScenarioConfig parse_config(const json& j, std::string name);

/// Normalized JSON with every field explicit.
json to_json(const ScenarioConfig& config);

/// FNV-1a 64 of the normalized JSON text, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

/// Physics checks beyond the schema (representation caps, grids, field
/// requirements per kind). Empty when the config is runnable.
std::vector<std::string> physics_diagnostics(const ScenarioConfig& config);

/// Applies "a.b.0.c=value"; the value is read as JSON when it parses and as a
/// string otherwise.
void apply_override(json& j, const std::string& assignment);

/// Reads a path, or a bundled scenario name when no such file exists.
json load_config_json(const std::string& path_or_name, std::string* name_out = nullptr);

struct ValidationReport {
  std::string name;
  std::vector<std::string> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

ValidationReport validate(const json& j, std::string name);

}  // namespace collspin::experiments
