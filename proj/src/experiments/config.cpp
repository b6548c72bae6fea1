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

#include "collspin/experiments/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "collspin/experiments/scenarios.hpp"
#include "collspin/numerics.hpp"

namespace collspin::experiments {

namespace {

constexpr std::pair<ScenarioKind, std::string_view> kKindNames[] = {
    {ScenarioKind::husimi_oat, "husimi_oat"},     {ScenarioKind::husimi_tat, "husimi_tat"},
    {ScenarioKind::qfi_curve, "qfi_curve"},       {ScenarioKind::gain_curve, "gain_curve"},
    {ScenarioKind::n_scan, "n_scan"},             {ScenarioKind::control_sweep, "control_sweep"},
    {ScenarioKind::qcrb_curve, "qcrb_curve"},     {ScenarioKind::qcrb_control, "qcrb_control"},
    {ScenarioKind::bloch_single, "bloch_single"}, {ScenarioKind::matrix_movie, "matrix_movie"},
};

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : sep) + p;
  return out;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return std::string(name);
  }
  return "?";
}

ScenarioKind parse_scenario_kind(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  std::vector<std::string> names;
  for (const auto& entry : kKindNames) names.emplace_back(entry.second);
  throw InvalidArgument("unknown scenario kind '" + std::string(text) + "' (known: " + join(names, ", ") + ")");
}

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : InvalidArgument(join(diagnostics, "; ")), diagnostics_(std::move(diagnostics)) {}

std::vector<double> GridSpec::points() const { return uniform_grid(start, stop, step); }

HamiltonianSpec HamiltonianConfig::build() const {
  HamiltonianSpec h;
  switch (parameters) {
    case ParameterSet::none: break;
    case ParameterSet::field_z: h = HamiltonianSpec::field_z(nominal.at(0)); break;
    case ParameterSet::field_xyz: h = HamiltonianSpec::field_xyz({nominal.at(0), nominal.at(1), nominal.at(2)}); break;
  }
  h.static_terms = terms;
  return h;
}

IntegratorOptions ScenarioConfig::integrator() const {
  IntegratorOptions o;
  o.rtol = tolerances.rtol;
  o.atol = tolerances.atol;
  return o;
}

SensingProblem ScenarioConfig::problem(const CaseSpec& c, std::optional<std::pair<ControlKind, double>> control) const {
  SensingProblem p;
  p.n_spins = n_spins;
  p.representation = representation;
  p.hamiltonian = hamiltonian.build();
  if (control) p.hamiltonian = with_control(p.hamiltonian, control->first, control->second);
  p.channels = c.channels;
  p.probe = probe;
  p.integrator = integrator();
  p.eigen_cutoff = tolerances.eigen_cutoff;
  return p;
}

// -----------------------------------------------------------------------------
// Parsing

namespace {

class Reader {
 public:
  std::vector<std::string> diagnostics;

  void error(const std::string& path, const std::string& message) { diagnostics.push_back(path + ": " + message); }

  bool expect_object(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) {
      error(path, "expected an object");
      return false;
    }
    for (const auto& [key, value] : j.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        std::vector<std::string> names(allowed.begin(), allowed.end());
        error(join_path(path, key), "unknown key (allowed: " + join(names, ", ") + ")");
      }
    }
    return true;
  }

  static std::string join_path(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  const json* field(const json& obj, const std::string& path, const std::string& key, bool required) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) error(join_path(path, key), "required field is missing");
      return nullptr;
    }
    return &*it;
  }

  void number(const json& obj, const std::string& path, const std::string& key, double& out, bool required = false) {
    if (const json* v = field(obj, path, key, required)) {
      if (!v->is_number()) {
        error(join_path(path, key), "expected a number");
      } else if (!std::isfinite(v->get<double>())) {
        error(join_path(path, key), "must be finite");
      } else {
        out = v->get<double>();
      }
    }
  }

  void integer(const json& obj, const std::string& path, const std::string& key, int& out, bool required = false) {
    if (const json* v = field(obj, path, key, required)) {
      if (!v->is_number_integer()) {
        error(join_path(path, key), "expected an integer");
      } else {
        const auto value = v->get<std::int64_t>();
        if (value < -1'000'000 || value > 1'000'000) {
          error(join_path(path, key), "integer out of range");
        } else {
          out = static_cast<int>(value);
        }
      }
    }
  }

  void string(const json& obj, const std::string& path, const std::string& key, std::string& out,
              bool required = false) {
    if (const json* v = field(obj, path, key, required)) {
      if (!v->is_string()) {
        error(join_path(path, key), "expected a string");
      } else {
        out = v->get<std::string>();
      }
    }
  }

  template <typename T, typename Parse>
  void enumerated(const json& obj, const std::string& path, const std::string& key, T& out, Parse&& parse,
                  bool required = false) {
    std::string text;
    const std::size_t before = diagnostics.size();
    string(obj, path, key, text, required);
    if (diagnostics.size() != before || text.empty()) {
      if (diagnostics.size() == before && obj.contains(key)) error(join_path(path, key), "must not be empty");
      return;
    }
    try {
      out = parse(text);
    } catch (const InvalidArgument& e) {
      error(join_path(path, key), e.what());
    }
  }

  void numbers(const json& v, const std::string& path, std::vector<double>& out) {
    if (!v.is_array()) {
      error(path, "expected an array of numbers");
      return;
    }
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        error(path + "." + std::to_string(i), "expected a finite number");
      } else {
        out.push_back(v[i].get<double>());
      }
    }
  }

  void grid(const json& v, const std::string& path, GridSpec& out) {
    if (!expect_object(v, path, {"start", "stop", "step"})) return;
    number(v, path, "start", out.start, true);
    number(v, path, "stop", out.stop, true);
    number(v, path, "step", out.step, true);
  }

  // Either an explicit list or a {start, stop, step} grid.
  void values_or_grid(const json& v, const std::string& path, std::vector<double>& out) {
    if (v.is_object()) {
      GridSpec g;
      const std::size_t before = diagnostics.size();
      grid(v, path, g);
      if (diagnostics.size() != before) return;
      try {
        out = g.points();
      } catch (const InvalidArgument& e) {
        error(path, e.what());
      }
    } else {
      numbers(v, path, out);
    }
  }

  void channel(const json& v, const std::string& path, NoiseChannelSpec& out) {
    if (!expect_object(v, path, {"scope", "kind", "rate"})) return;
    enumerated(v, path, "scope", out.scope, parse_noise_scope, true);
    enumerated(v, path, "kind", out.kind, parse_noise_kind, true);
    number(v, path, "rate", out.rate, true);
    if (v.contains("rate") && v["rate"].is_number() && v["rate"].get<double>() < 0.0) {
      error(join_path(path, "rate"), "must be >= 0");
    }
  }
};

Axis parse_axis(std::string_view text) {
  if (text == "x") return Axis::x;
  if (text == "y") return Axis::y;
  if (text == "z") return Axis::z;
  throw InvalidArgument("unknown axis '" + std::string(text) + "' (expected x|y|z)");
}

ParameterSet parse_parameter_set(std::string_view text) {
  if (text == "none") return ParameterSet::none;
  if (text == "field_z") return ParameterSet::field_z;
  if (text == "field_xyz") return ParameterSet::field_xyz;
  throw InvalidArgument("unknown parameter set '" + std::string(text) + "' (expected none|field_z|field_xyz)");
}

std::string to_string(ParameterSet p) {
  switch (p) {
    case ParameterSet::none: return "none";
    case ParameterSet::field_z: return "field_z";
    case ParameterSet::field_xyz: return "field_xyz";
  }
  return "?";
}

std::size_t parameter_count(ParameterSet p) {
  return p == ParameterSet::none ? 0 : p == ParameterSet::field_z ? 1 : 3;
}

}  // namespace

ScenarioConfig parse_config(const json& j, std::string name) {
  Reader r;
  ScenarioConfig c;
  c.name = std::move(name);
  if (!r.expect_object(j, "", {"kind", "description", "provenance", "n_spins", "representation", "probe",
                               "hamiltonian", "cases", "controls", "time_grid", "n_list", "integrated_gain",
                               "weight", "repetitions", "husimi", "snapshot_times", "output", "tolerances"})) {
    throw ConfigError(r.diagnostics);
  }
  r.enumerated(j, "", "kind", c.kind, parse_scenario_kind, true);
  r.string(j, "", "description", c.description);
  r.string(j, "", "provenance", c.provenance);
  r.integer(j, "", "n_spins", c.n_spins, true);
  if (j.contains("representation")) {
    std::string text;
    r.string(j, "", "representation", text);
    if (text != "auto" && !text.empty()) {
      try {
        c.representation = parse_representation(text);
      } catch (const InvalidArgument& e) {
        r.error("representation", e.what());
      }
    }
  }

  if (const json* p = r.field(j, "", "probe", false)) {
    if (r.expect_object(*p, "probe", {"kind", "axis", "rel_phase", "phases", "theta", "phi", "two_m"})) {
      r.enumerated(*p, "probe", "kind", c.probe.kind, parse_probe_kind, true);
      r.enumerated(*p, "probe", "axis", c.probe.axis, parse_axis);
      r.number(*p, "probe", "rel_phase", c.probe.rel_phase);
      if (p->contains("phases")) {
        std::vector<double> phases;
        r.numbers((*p)["phases"], "probe.phases", phases);
        if (phases.size() == 3) {
          std::copy(phases.begin(), phases.end(), c.probe.phases.begin());
        } else {
          r.error("probe.phases", "expected three component phases");
        }
      }
      r.number(*p, "probe", "theta", c.probe.theta);
      r.number(*p, "probe", "phi", c.probe.phi);
      r.integer(*p, "probe", "two_m", c.probe.two_m);
    }
  }

  bool nominal_given = false;
  if (const json* h = r.field(j, "", "hamiltonian", false)) {
    if (r.expect_object(*h, "hamiltonian", {"parameters", "nominal", "terms"})) {
      r.enumerated(*h, "hamiltonian", "parameters", c.hamiltonian.parameters, parse_parameter_set);
      if (h->contains("nominal")) {
        nominal_given = true;
        r.numbers((*h)["nominal"], "hamiltonian.nominal", c.hamiltonian.nominal);
      }
      if (const json* terms = r.field(*h, "hamiltonian", "terms", false)) {
        if (!terms->is_array()) {
          r.error("hamiltonian.terms", "expected an array");
        } else {
          for (std::size_t i = 0; i < terms->size(); ++i) {
            const std::string path = "hamiltonian.terms." + std::to_string(i);
            HamiltonianTerm t;
            if (r.expect_object((*terms)[i], path, {"op", "coefficient"})) {
              r.enumerated((*terms)[i], path, "op", t.op, parse_operator_tag, true);
              r.number((*terms)[i], path, "coefficient", t.coefficient, true);
            }
            c.hamiltonian.terms.push_back(t);
          }
        }
      }
    }
  }
  if (!nominal_given) {
    c.hamiltonian.nominal = c.hamiltonian.parameters == ParameterSet::field_xyz ? std::vector<double>{0.1, 0.1, 0.1}
                            : c.hamiltonian.parameters == ParameterSet::field_z ? std::vector<double>{0.0}
                                                                                : std::vector<double>{};
  }
  if (c.hamiltonian.nominal.size() != parameter_count(c.hamiltonian.parameters)) {
    r.error("hamiltonian.nominal", "expected " + std::to_string(parameter_count(c.hamiltonian.parameters)) +
                                       " values for parameter set " + to_string(c.hamiltonian.parameters));
  }

  if (const json* cases = r.field(j, "", "cases", false)) {
    if (!cases->is_array()) {
      r.error("cases", "expected an array");
    } else {
      std::set<std::string> labels;
      for (std::size_t i = 0; i < cases->size(); ++i) {
        const std::string path = "cases." + std::to_string(i);
        CaseSpec cs;
        const json& cj = (*cases)[i];
        if (r.expect_object(cj, path, {"label", "channels"})) {
          r.string(cj, path, "label", cs.label, true);
          if (!cs.label.empty() && !labels.insert(cs.label).second) r.error(path + ".label", "duplicate label");
          if (const json* ch = r.field(cj, path, "channels", true)) {
            if (!ch->is_array()) {
              r.error(path + ".channels", "expected an array");
            } else {
              for (std::size_t k = 0; k < ch->size(); ++k) {
                NoiseChannelSpec spec;
                r.channel((*ch)[k], path + ".channels." + std::to_string(k), spec);
                cs.channels.push_back(spec);
              }
            }
          }
        }
        c.cases.push_back(std::move(cs));
      }
    }
  }

  if (const json* controls = r.field(j, "", "controls", false)) {
    if (!controls->is_array()) {
      r.error("controls", "expected an array");
    } else {
      for (std::size_t i = 0; i < controls->size(); ++i) {
        const std::string path = "controls." + std::to_string(i);
        ControlSpec cs;
        const json& cj = (*controls)[i];
        if (r.expect_object(cj, path, {"kind", "chi"})) {
          r.enumerated(cj, path, "kind", cs.kind, parse_control_kind, true);
          if (const json* chi = r.field(cj, path, "chi", true)) r.values_or_grid(*chi, path + ".chi", cs.chi);
        }
        c.controls.push_back(std::move(cs));
      }
    }
  }

  if (const json* g = r.field(j, "", "time_grid", false)) r.grid(*g, "time_grid", c.time_grid);
  if (const json* n = r.field(j, "", "n_list", false)) {
    if (!n->is_array()) {
      r.error("n_list", "expected an array of integers");
    } else {
      for (std::size_t i = 0; i < n->size(); ++i) {
        if (!(*n)[i].is_number_integer()) {
          r.error("n_list." + std::to_string(i), "expected an integer");
        } else {
          c.n_list.push_back((*n)[i].get<int>());
        }
      }
    }
  }
  if (const json* ig = r.field(j, "", "integrated_gain", false)) {
    if (r.expect_object(*ig, "integrated_gain", {"t_max"})) r.number(*ig, "integrated_gain", "t_max", c.integration_t_max);
  }
  if (const json* w = r.field(j, "", "weight", false)) {
    bool ok = w->is_array() && w->size() == 3;
    for (std::size_t i = 0; ok && i < 3; ++i) {
      ok = (*w)[i].is_array() && (*w)[i].size() == 3;
      for (std::size_t k = 0; ok && k < 3; ++k) {
        ok = (*w)[i][k].is_number();
        if (ok) c.weight[i][k] = (*w)[i][k].get<double>();
      }
    }
    if (!ok) r.error("weight", "expected a 3x3 array of numbers");
  }
  r.integer(j, "", "repetitions", c.repetitions);
  if (const json* h = r.field(j, "", "husimi", false)) {
    if (r.expect_object(*h, "husimi", {"n_theta", "n_phi", "chi_t", "search"})) {
      r.integer(*h, "husimi", "n_theta", c.husimi.grid.n_theta);
      r.integer(*h, "husimi", "n_phi", c.husimi.grid.n_phi);
      if (const json* chi = r.field(*h, "husimi", "chi_t", false)) r.values_or_grid(*chi, "husimi.chi_t", c.husimi.chi_t);
      if (const json* s = r.field(*h, "husimi", "search", false)) {
        GridSpec g;
        r.grid(*s, "husimi.search", g);
        c.husimi.search = g;
      }
    }
  }
  if (const json* s = r.field(j, "", "snapshot_times", false)) r.numbers(*s, "snapshot_times", c.snapshot_times);
  r.string(j, "", "output", c.output);
  if (const json* t = r.field(j, "", "tolerances", false)) {
    if (r.expect_object(*t, "tolerances", {"rtol", "atol", "eigen_cutoff", "pinv_cutoff"})) {
      r.number(*t, "tolerances", "rtol", c.tolerances.rtol);
      r.number(*t, "tolerances", "atol", c.tolerances.atol);
      r.number(*t, "tolerances", "eigen_cutoff", c.tolerances.eigen_cutoff);
      r.number(*t, "tolerances", "pinv_cutoff", c.tolerances.pinv_cutoff);
    }
  }
  if (!r.diagnostics.empty()) throw ConfigError(r.diagnostics);
  return c;
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["kind"] = to_string(c.kind);
  j["description"] = c.description;
  j["provenance"] = c.provenance;
  j["n_spins"] = c.n_spins;
  j["representation"] = c.representation ? to_string(*c.representation) : "auto";
  j["probe"] = {{"kind", to_string(c.probe.kind)},
                {"axis", to_string(c.probe.axis)},
                {"rel_phase", c.probe.rel_phase},
                {"phases", c.probe.phases},
                {"theta", c.probe.theta},
                {"phi", c.probe.phi},
                {"two_m", c.probe.two_m}};
  json terms = json::array();
  for (const auto& t : c.hamiltonian.terms) terms.push_back({{"op", to_string(t.op)}, {"coefficient", t.coefficient}});
  j["hamiltonian"] = {
      {"parameters", to_string(c.hamiltonian.parameters)}, {"nominal", c.hamiltonian.nominal}, {"terms", terms}};
  json cases = json::array();
  for (const auto& cs : c.cases) {
    json channels = json::array();
    for (const auto& ch : cs.channels) {
      channels.push_back({{"scope", to_string(ch.scope)}, {"kind", to_string(ch.kind)}, {"rate", ch.rate}});
    }
    cases.push_back({{"label", cs.label}, {"channels", channels}});
  }
  j["cases"] = cases;
  json controls = json::array();
  for (const auto& cs : c.controls) controls.push_back({{"kind", to_string(cs.kind)}, {"chi", cs.chi}});
  j["controls"] = controls;
  j["time_grid"] = {{"start", c.time_grid.start}, {"stop", c.time_grid.stop}, {"step", c.time_grid.step}};
  j["n_list"] = c.n_list;
  j["integrated_gain"] = {{"t_max", c.integration_t_max}};
  j["weight"] = c.weight;
  j["repetitions"] = c.repetitions;
  json husimi = {{"n_theta", c.husimi.grid.n_theta}, {"n_phi", c.husimi.grid.n_phi}, {"chi_t", c.husimi.chi_t}};
  if (c.husimi.search) {
    husimi["search"] = {{"start", c.husimi.search->start}, {"stop", c.husimi.search->stop}, {"step", c.husimi.search->step}};
  }
  j["husimi"] = husimi;
  j["snapshot_times"] = c.snapshot_times;
  j["output"] = c.output;
  j["tolerances"] = {{"rtol", c.tolerances.rtol},
                     {"atol", c.tolerances.atol},
                     {"eigen_cutoff", c.tolerances.eigen_cutoff},
                     {"pinv_cutoff", c.tolerances.pinv_cutoff}};
  return j;
}

std::string config_hash(const ScenarioConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// -----------------------------------------------------------------------------
// Physics checks

namespace {

void check_grid(const GridSpec& g, const std::string& path, bool positive_start, std::vector<std::string>& out) {
  if (!(g.step > 0.0)) out.push_back(path + ": step must be positive");
  if (g.stop < g.start) out.push_back(path + ": stop is below start");
  if (positive_start ? !(g.start > 0.0) : g.start < 0.0) {
    out.push_back(path + ": start must be " + (positive_start ? "> 0 (G = Q/t^2 is undefined at t = 0)" : ">= 0"));
  }
  if (g.step > 0.0 && g.stop >= g.start && (g.stop - g.start) / g.step > 2e6) {
    out.push_back(path + ": grid has more than 2e6 points");
  }
}

void check_case_caps(const ScenarioConfig& c, int n, const std::string& where, std::vector<std::string>& out) {
  for (std::size_t i = 0; i < c.cases.size(); ++i) {
    const auto& cs = c.cases[i];
    const Representation rep = c.representation.value_or(auto_representation(n, cs.channels));
    const bool local = std::any_of(cs.channels.begin(), cs.channels.end(),
                                   [](const NoiseChannelSpec& ch) { return ch.scope == NoiseScope::local; });
    const std::string path = "cases." + std::to_string(i) + " (" + cs.label + ")" + where;
    if (rep == Representation::symmetric && local && n > 1) {
      out.push_back(path + ": local channels need the full or permutation representation");
    }
    if (rep != Representation::symmetric && n > kMaxFullDensitySpins) {
      out.push_back(path + ": " + to_string(rep) + " representation is capped at N = " +
                    std::to_string(kMaxFullDensitySpins) + " (got N = " + std::to_string(n) + ")");
    }
  }
}

}  // namespace

std::vector<std::string> physics_diagnostics(const ScenarioConfig& c) {
  std::vector<std::string> out;
  const auto k = c.kind;
  if (c.n_spins < 1) out.push_back("n_spins: must be >= 1");
  if (c.n_spins > 400) out.push_back("n_spins: symmetric-sector dimension is capped at N = 400");
  if (c.repetitions < 1) out.push_back("repetitions: must be >= 1");
  if (!(c.tolerances.rtol > 0.0) || !(c.tolerances.atol > 0.0)) out.push_back("tolerances: rtol and atol must be > 0");
  if (c.tolerances.eigen_cutoff < 0.0 || c.tolerances.pinv_cutoff < 0.0) out.push_back("tolerances: cutoffs must be >= 0");
  if (c.n_spins >= 1 && k != ScenarioKind::n_scan) check_case_caps(c, c.n_spins, "", out);
  if ((c.probe.kind == ProbeKind::multi_ghz) && c.n_spins < 2) out.push_back("probe: multi_ghz needs n_spins >= 2");
  if (c.probe.kind == ProbeKind::dicke && (std::abs(c.probe.two_m) > c.n_spins || (c.n_spins - c.probe.two_m) % 2 != 0)) {
    out.push_back("probe.two_m: must satisfy |2m| <= N with matching parity");
  }

  const bool needs_cases = k == ScenarioKind::qfi_curve || k == ScenarioKind::gain_curve || k == ScenarioKind::n_scan ||
                           k == ScenarioKind::control_sweep || k == ScenarioKind::qcrb_curve ||
                           k == ScenarioKind::qcrb_control || k == ScenarioKind::bloch_single ||
                           k == ScenarioKind::matrix_movie;
  if (needs_cases && c.cases.empty()) out.push_back("cases: at least one case is required for " + to_string(k));

  const bool curve = k == ScenarioKind::qfi_curve || k == ScenarioKind::gain_curve ||
                     k == ScenarioKind::control_sweep || k == ScenarioKind::qcrb_curve ||
                     k == ScenarioKind::qcrb_control || k == ScenarioKind::n_scan;
  if (curve) {
    check_grid(c.time_grid, "time_grid", true, out);
    if (c.hamiltonian.parameters == ParameterSet::none) out.push_back("hamiltonian.parameters: " + to_string(k) + " needs an estimated parameter");
  }
  if (k == ScenarioKind::bloch_single || k == ScenarioKind::matrix_movie) check_grid(c.time_grid, "time_grid", false, out);

  switch (k) {
    case ScenarioKind::husimi_oat:
    case ScenarioKind::husimi_tat:
      if (c.n_spins < 2) out.push_back("n_spins: twisting needs at least two spins");
      if (c.husimi.grid.n_theta < 2 || c.husimi.grid.n_phi < 3) out.push_back("husimi: need n_theta >= 2 and n_phi >= 3");
      if (k == ScenarioKind::husimi_oat && c.husimi.chi_t.empty()) out.push_back("husimi.chi_t: at least one value is required");
      if (k == ScenarioKind::husimi_tat && c.husimi.chi_t.empty() && !c.husimi.search) {
        out.push_back("husimi: give chi_t values or a search grid");
      }
      if (c.husimi.search) check_grid(*c.husimi.search, "husimi.search", false, out);
      break;
    case ScenarioKind::n_scan:
      if (c.n_list.empty()) out.push_back("n_list: at least one N is required");
      for (int n : c.n_list) {
        if (n < 1) out.push_back("n_list: N must be >= 1");
        else check_case_caps(c, n, " at N = " + std::to_string(n), out);
      }
      break;
    case ScenarioKind::control_sweep:
      if (c.controls.empty()) out.push_back("controls: at least one control is required");
      if (c.time_grid.stop < c.integration_t_max * (1 - 1e-12)) {
        out.push_back("time_grid.stop: must reach integrated_gain.t_max");
      }
      break;
    case ScenarioKind::qcrb_curve:
    case ScenarioKind::qcrb_control:
      if (c.hamiltonian.parameters != ParameterSet::field_xyz) out.push_back("hamiltonian.parameters: " + to_string(k) + " needs field_xyz");
      if (k == ScenarioKind::qcrb_control && c.controls.empty()) out.push_back("controls: at least one control is required");
      break;
    case ScenarioKind::bloch_single:
      if (c.n_spins != 1) out.push_back("n_spins: bloch_single needs exactly one spin");
      break;
    case ScenarioKind::matrix_movie:
      if (c.snapshot_times.empty()) out.push_back("snapshot_times: at least one time is required");
      for (double t : c.snapshot_times) {
        if (t < 0.0) out.push_back("snapshot_times: times must be >= 0");
      }
      break;
    default: break;
  }
  for (std::size_t i = 0; i < c.controls.size(); ++i) {
    if (c.controls[i].chi.empty()) out.push_back("controls." + std::to_string(i) + ".chi: at least one value is required");
  }
  return out;
}

// -----------------------------------------------------------------------------
// Overrides and loading

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError({"override '" + assignment + "': expected key=value"});
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &j;
  std::stringstream ss(path);
  std::string segment;
  std::vector<std::string> segments;
  while (std::getline(ss, segment, '.')) segments.push_back(segment);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const std::string& s = segments[i];
    if (s.empty()) throw ConfigError({"override '" + path + "': empty path segment"});
    const bool last = i + 1 == segments.size();
    if (node->is_array()) {
      if (!std::all_of(s.begin(), s.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
        throw ConfigError({"override '" + path + "': '" + s + "' is not an array index"});
      }
      const auto index = std::stoul(s);
      if (index >= node->size()) throw ConfigError({"override '" + path + "': index " + s + " is out of range"});
      node = &(*node)[index];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) throw ConfigError({"override '" + path + "': '" + s + "' is below a scalar"});
      node = &(*node)[s];
    }
    if (last) *node = value;
  }
}

json load_config_json(const std::string& path_or_name, std::string* name_out) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::is_regular_file(path_or_name, ec)) {
    std::ifstream in(path_or_name, std::ios::binary);
    if (!in) throw ConfigError({"cannot read config '" + path_or_name + "'"});
    std::stringstream buf;
    buf << in.rdbuf();
    if (name_out) *name_out = fs::path(path_or_name).stem().string();
    try {
      return json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw ConfigError({path_or_name + ": " + e.what()});
    }
  }
  if (const BundledScenario* s = find_bundled_scenario(path_or_name)) {
    if (name_out) *name_out = s->name;
    return json::parse(s->json);
  }
  throw ConfigError({"no config file or bundled scenario named '" + path_or_name + "'"});
}

const BundledScenario* find_bundled_scenario(std::string_view name) {
  for (const auto& s : bundled_scenarios()) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

ValidationReport validate(const json& j, std::string name) {
  ValidationReport report;
  report.name = name;
  try {
    const ScenarioConfig c = parse_config(j, std::move(name));
    report.diagnostics = physics_diagnostics(c);
  } catch (const ConfigError& e) {
    report.diagnostics = e.diagnostics();
  }
  return report;
}

}  // namespace collspin::experiments
