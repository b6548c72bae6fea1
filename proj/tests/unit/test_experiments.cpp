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

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "collspin/experiments/config.hpp"
#include "collspin/experiments/csv.hpp"
#include "collspin/experiments/runner.hpp"
#include "collspin/experiments/scenarios.hpp"

using namespace collspin;
using namespace collspin::experiments;
namespace fs = std::filesystem;

namespace {

json small_curve() {
  return json::parse(R"({
    "kind": "qfi_curve",
    "n_spins": 3,
    "probe": {"kind": "ghz", "axis": "z"},
    "hamiltonian": {"parameters": "field_z"},
    "cases": [
      {"label": "local emission", "channels": [{"scope": "local", "kind": "emission", "rate": 0.2}]},
      {"label": "collective_dephasing", "channels": [{"scope": "collective", "kind": "dephasing", "rate": 0.2}]}
    ],
    "time_grid": {"start": 0.1, "stop": 2.0, "step": 0.1}
  })");
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("collspin_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string body(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') out += line + "\n";
  }
  return out;
}

bool mentions(const std::vector<std::string>& diags, const std::string& needle) {
  for (const auto& d : diags) {
    if (d.find(needle) != std::string::npos) return true;
  }
  return false;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(COLLSPIN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("bundled catalog") {
  const auto& all = bundled_scenarios();
  CHECK(all.size() == 12);
  for (const char* name : {"fig1a", "fig1b", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10",
                           "fig11"}) {
    const auto* s = find_bundled_scenario(name);
    REQUIRE(s != nullptr);
    const json j = json::parse(s->json);
    const auto report = validate(j, name);
    CHECK_MESSAGE(report.ok(), name);
    const auto c = parse_config(j, name);
    CHECK(!c.description.empty());
    CHECK(!c.provenance.empty());
    // Normalized form is a fixed point.
    const json normal = to_json(c);
    CHECK(to_json(parse_config(normal, name)) == normal);
    CHECK(config_hash(parse_config(normal, name)) == config_hash(c));
  }
  CHECK(find_bundled_scenario("fig12") == nullptr);
}

TEST_CASE("schema errors are collected and named") {
  json j = small_curve();
  j["cases"][0]["channels"][0].erase("rate");
  j["bogus"] = 1;
  j["time_grid"]["step"] = "fast";
  try {
    parse_config(j, "t");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e.diagnostics(), "rate"));
    CHECK(mentions(e.diagnostics(), "bogus"));
    CHECK(mentions(e.diagnostics(), "time_grid.step"));
    CHECK(e.diagnostics().size() >= 3);
  }
  json neg = small_curve();
  neg["cases"][0]["channels"][0]["rate"] = -0.2;
  CHECK(mentions(validate(neg, "t").diagnostics, "rate"));
  json kind = small_curve();
  kind["kind"] = "husimi_xyz";
  CHECK(!validate(kind, "t").ok());
}

TEST_CASE("physics diagnostics") {
  CHECK(validate(small_curve(), "t").ok());
  json big = small_curve();
  big["n_spins"] = 20;
  const auto r = validate(big, "t");
  CHECK(mentions(r.diagnostics, "capped at N = 12"));
  json zero = small_curve();
  zero["time_grid"]["start"] = 0.0;
  CHECK(mentions(validate(zero, "t").diagnostics, "time_grid"));
  json sym = small_curve();
  sym["representation"] = "symmetric";
  CHECK(mentions(validate(sym, "t").diagnostics, "local channels"));
  json qcrb = small_curve();
  qcrb["kind"] = "qcrb_curve";
  CHECK(mentions(validate(qcrb, "t").diagnostics, "field_xyz"));
  json bloch = small_curve();
  bloch["kind"] = "bloch_single";
  CHECK(mentions(validate(bloch, "t").diagnostics, "exactly one spin"));
  json sweep = small_curve();
  sweep["kind"] = "control_sweep";
  sweep["controls"] = json::parse(R"([{"kind": "linear_jx", "chi": [0, 0.1]}])");
  CHECK(mentions(validate(sweep, "t").diagnostics, "t_max"));
}

TEST_CASE("dotted-path overrides") {
  json j = small_curve();
  apply_override(j, "n_spins=5");
  apply_override(j, "cases.1.channels.0.rate=0.5");
  apply_override(j, "cases.0.label=renamed");
  apply_override(j, "time_grid={\"start\": 0.2, \"stop\": 1, \"step\": 0.2}");
  CHECK(j["n_spins"] == 5);
  CHECK(j["cases"][1]["channels"][0]["rate"] == 0.5);
  CHECK(j["cases"][0]["label"] == "renamed");
  CHECK(j["time_grid"]["start"] == 0.2);
  CHECK_THROWS_AS(apply_override(j, "novalue"), ConfigError);
}

TEST_CASE("CSV rendering") {
  ResultTable t;
  t.name = "demo";
  t.description = "demo table";
  t.columns = {"t", "label", "v"};
  t.key_columns = 1;
  t.add_row({0.2, std::string("b,c"), std::int64_t{3}});
  t.add_row({0.1, std::string("say \"hi\""), std::int64_t{-1}});
  CHECK_THROWS_AS(t.add_row({1.0}), InvalidArgument);
  t.sort_rows();
  const std::string csv = render_csv(t, {"s", "qfi_curve", "0123456789abcdef", "9.9", "rtol=1e-08"});
  CHECK(csv.find("# engine: collspin 9.9\n") == 0);
  CHECK(csv.find("# config_hash: fnv1a64:0123456789abcdef\n") != std::string::npos);
  CHECK(csv.find("# tolerances: rtol=1e-08\n") != std::string::npos);
  CHECK(body(csv) == "t,label,v\n0.10000000000000001,\"say \"\"hi\"\"\",-1\n0.20000000000000001,\"b,c\",3\n");
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);

  ResultTable bad = t;
  bad.rows[0][0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(bad.check_finite(), NumericalError);
}

TEST_CASE("atomic writes leave no temporary files") {
  const auto dir = scratch_dir("atomic");
  write_atomic(dir / "a.csv", "one\n");
  write_atomic(dir / "a.csv", "two\n");
  CHECK(slurp(dir / "a.csv") == "two\n");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  fs::remove_all(dir);
}

TEST_CASE("runs are deterministic and thread-count independent") {
  const auto cfg = parse_config(small_curve(), "small");
  const auto d1 = scratch_dir("det1");
  const auto d2 = scratch_dir("det2");
  const auto a = run_scenario(cfg, {d1, 1});
  const auto b = run_scenario(cfg, {d2, 3});
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    CHECK(a.files[i].filename() == b.files[i].filename());
    CHECK(slurp(a.files[i]) == slurp(b.files[i]));
  }
  const json manifest = json::parse(slurp(a.manifest));
  CHECK(manifest["scenario"] == "small");
  CHECK(manifest["kind"] == "qfi_curve");
  REQUIRE(manifest["tables"].size() == 2);
  const auto& first = manifest["tables"][0];
  CHECK(first["columns"] == json::array({"chi", "t", "Q", "G"}));
  CHECK(first["rows"] == 20);
  CHECK(fs::exists(a.directory / first["file"].get<std::string>()));
  CHECK(first["file"] == "qfi_collective_dephasing.csv");
  CHECK(manifest["tables"][1]["file"] == "qfi_local_emission.csv");
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("per-kind tables") {
  json nscan = small_curve();
  nscan["kind"] = "n_scan";
  nscan["n_list"] = {2, 3};
  nscan["time_grid"] = {{"start", 0.01}, {"stop", 10.0}, {"step", 0.05}};
  auto tables = compute_tables(parse_config(nscan, "n"), 1);
  REQUIRE(tables.size() == 2);
  CHECK(tables[0].columns == std::vector<std::string>{"N", "Q_max", "t_opt", "G_max"});
  CHECK(tables[0].rows.size() == 2);

  json sweep = small_curve();
  sweep["kind"] = "control_sweep";
  sweep["controls"] = json::parse(R"([{"kind": "linear_jx", "chi": {"start": 0, "stop": 0.2, "step": 0.1}}])");
  sweep["time_grid"] = {{"start", 0.1}, {"stop", 5.0}, {"step", 0.1}};
  sweep["integrated_gain"] = {{"t_max", 5.0}};
  tables = compute_tables(parse_config(sweep, "s"), 1);
  REQUIRE(tables.size() == 4);
  CHECK(tables[0].name == "gain_collective_dephasing_linear_jx");
  CHECK(tables[2].name == "integrated_gain_collective_dephasing_linear_jx");
  CHECK(tables[2].rows.size() == 3);

  json movie = small_curve();
  movie["kind"] = "matrix_movie";
  movie["snapshot_times"] = {0.0, 1.0};
  movie["time_grid"] = {{"start", 0.0}, {"stop", 1.0}, {"step", 0.5}};
  tables = compute_tables(parse_config(movie, "m"), 1);
  CHECK(tables[0].rows.size() == 2 * 16);

  json bloch = json::parse(R"({"kind": "bloch_single", "n_spins": 1,
    "hamiltonian": {"terms": [{"op": "sz", "coefficient": 1.0}]},
    "cases": [{"label": "emission", "channels": [{"scope": "local", "kind": "emission", "rate": 0.2}]}],
    "time_grid": {"start": 0.0, "stop": 1.0, "step": 0.5}})");
  tables = compute_tables(parse_config(bloch, "b"), 1);
  REQUIRE(tables.size() == 1);
  CHECK(tables[0].columns == std::vector<std::string>{"chi", "t", "rx", "ry", "rz"});
  CHECK(tables[0].rows.size() == 3);
}

TEST_CASE("numerical failures write nothing") {
  json j = small_curve();
  j["kind"] = "n_scan";
  j["n_list"] = {2};
  j["cases"] = json::parse(R"([{"label": "noiseless", "channels": []}])");
  const auto dir = scratch_dir("failclosed");
  CHECK_THROWS_AS(run_scenario(parse_config(j, "noiseless_scan"), {dir, 1}), NumericalError);
  CHECK(!fs::exists(dir / "noiseless_scan"));
  fs::remove_all(dir);
}

TEST_CASE("command-line exit codes") {
  const auto dir = scratch_dir("cli");
  CHECK(run_cli("list-scenarios") == 0);
  CHECK(run_cli("validate --config fig2") == 0);
  CHECK(run_cli("validate --config fig2 --override n_spins=20") == 2);
  CHECK(run_cli("validate --config /nonexistent/file.json") == 2);
  CHECK(run_cli("run --config fig8 --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "fig8" / "manifest.json"));
  CHECK(run_cli("run --config fig3 --override 'n_list=[2]' --override 'cases=[{\"label\":\"x\",\"channels\":[]}]' "
                "--out " + dir.string()) == 3);
  CHECK(!fs::exists(dir / "fig3"));
  CHECK(run_cli("bogus-verb") != 0);

  const std::string env_run = "COLLSPIN_OUT_DIR=" + dir.string() + "/env " + std::string(COLLSPIN_CLI_PATH) +
                              " run --config fig8 > /dev/null 2>&1";
  CHECK(std::system(env_run.c_str()) == 0);
  CHECK(fs::exists(dir / "env" / "fig8" / "manifest.json"));

  const fs::path cfg = dir / "custom.json";
  std::ofstream(cfg) << small_curve().dump();
  CHECK(run_cli("run --config " + cfg.string() + " --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "custom" / "qfi_local_emission.csv"));
  fs::remove_all(dir);
}
