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

// collspin command-line runner: run, validate and list bundled scenarios.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "collspin/experiments/config.hpp"
#include "collspin/experiments/runner.hpp"
#include "collspin/experiments/scenarios.hpp"

namespace ex = collspin::experiments;

namespace {

constexpr int kConfigFailure = 2;
constexpr int kNumericalFailure = 3;

std::string default_out_dir() {
  const char* env = std::getenv("COLLSPIN_OUT_DIR");
  return (env != nullptr && *env != '\0') ? env : "out";
}

nlohmann::json load_with_overrides(const std::string& config, const std::vector<std::string>& overrides,
                                   std::string* name) {
  nlohmann::json j = ex::load_config_json(config, name);
  for (const auto& o : overrides) ex::apply_override(j, o);
  return j;
}

int report(const ex::ValidationReport& r) {
  if (r.ok()) {
    std::cout << r.name << ": ok\n";
    return 0;
  }
  for (const auto& d : r.diagnostics) std::cerr << r.name << ": " << d << "\n";
  return kConfigFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collective spin metrology simulations"};
  app.set_version_flag("--version", ex::engine_version());
  app.require_subcommand(1);

  std::string config;
  std::string out_dir = default_out_dir();
  unsigned threads = 0;
  std::vector<std::string> overrides;

  auto* run = app.add_subcommand("run", "Run a scenario and write CSV tables plus manifest.json");
  run->add_option("--config", config, "Config file or bundled scenario name")->required();
  run->add_option("--out", out_dir, "Output root (default: $COLLSPIN_OUT_DIR or ./out)");
  run->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  run->add_option("--override", overrides, "Dotted-path override key=value (repeatable)");

  auto* val = app.add_subcommand("validate", "Check a config without running it");
  val->add_option("--config", config, "Config file or bundled scenario name")->required();
  val->add_option("--override", overrides, "Dotted-path override key=value (repeatable)");

  std::string dump_dir;
  auto* list = app.add_subcommand("list-scenarios", "List bundled scenarios");
  list->add_option("--dump", dump_dir, "Also write each bundled config to DIR/<name>.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& s : ex::bundled_scenarios()) {
        const auto j = nlohmann::json::parse(s.json);
        std::cout << s.name << "\t" << j.value("kind", "") << "\t" << j.value("description", "") << "\n";
        if (!dump_dir.empty()) {
          std::filesystem::create_directories(dump_dir);
          std::ofstream(std::filesystem::path(dump_dir) / (s.name + ".json")) << s.json;
        }
      }
      return 0;
    }
    std::string name;
    const nlohmann::json j = load_with_overrides(config, overrides, &name);
    if (val->parsed()) return report(ex::validate(j, name));

    const ex::ScenarioConfig cfg = ex::parse_config(j, name);
    const auto result = ex::run_scenario(cfg, ex::RunOptions{out_dir, threads});
    for (const auto& f : result.files) std::cout << f.string() << "\n";
    std::cout << result.manifest.string() << "\n";
    return 0;
  } catch (const ex::ConfigError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << "config error: " << d << "\n";
    return kConfigFailure;
  } catch (const collspin::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const collspin::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const collspin::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}
