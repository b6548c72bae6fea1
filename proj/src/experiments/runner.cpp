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

#include "collspin/experiments/runner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>

#include "collspin/numerics.hpp"
#include "collspin/phase_space.hpp"
#include "collspin/prep.hpp"

namespace collspin::experiments {

std::string engine_version() { return COLLSPIN_VERSION; }

namespace {

std::string sanitize(const std::string& label) {
  std::string out;
  for (char c : label) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

// Grid with a leading 0 so that evolutions start from the probe.
std::vector<double> with_origin(const std::vector<double>& grid) {
  std::vector<double> out;
  if (grid.empty() || grid.front() > 0.0) out.push_back(0.0);
  out.insert(out.end(), grid.begin(), grid.end());
  return out;
}

struct ControlPoint {
  std::size_t control = 0;
  double chi = 0.0;
};

// Flattened (control, chi) points, or a single uncontrolled point.
std::vector<std::optional<ControlPoint>> control_points(const ScenarioConfig& c) {
  std::vector<std::optional<ControlPoint>> out;
  if (c.controls.empty()) {
    out.emplace_back();
    return out;
  }
  for (std::size_t k = 0; k < c.controls.size(); ++k) {
    for (double chi : c.controls[k].chi) out.push_back(ControlPoint{k, chi});
  }
  return out;
}

SensingProblem problem_for(const ScenarioConfig& c, const CaseSpec& cs, const std::optional<ControlPoint>& cp) {
  if (!cp) return c.problem(cs);
  return c.problem(cs, std::make_pair(c.controls[cp->control].kind, cp->chi));
}

std::string table_stem(const std::string& prefix, const CaseSpec& cs, const ScenarioConfig& c,
                       const std::optional<ControlPoint>& cp) {
  std::string stem = prefix + "_" + sanitize(cs.label);
  if (cp) stem += "_" + to_string(c.controls[cp->control].kind);
  return stem;
}

nlohmann::json case_meta(const CaseSpec& cs, const ScenarioConfig& c, const std::optional<ControlPoint>& cp) {
  nlohmann::json meta = {{"case", cs.label}};
  nlohmann::json channels = nlohmann::json::array();
  for (const auto& ch : cs.channels) channels.push_back({{"channel", ch.tag()}, {"rate", ch.rate}});
  meta["channels"] = channels;
  if (cp) meta["control"] = to_string(c.controls[cp->control].kind);
  return meta;
}

// Tables keyed by stem; rows from parallel jobs are appended in job order. A
// deque keeps references from get() valid while new tables are added.
class TableSet {
 public:
  ResultTable& get(const std::string& stem, const std::function<ResultTable()>& make) {
    for (auto& t : tables_) {
      if (t.name == stem) return t;
    }
    tables_.push_back(make());
    tables_.back().name = stem;
    return tables_.back();
  }
  std::vector<ResultTable> take() { return {std::make_move_iterator(tables_.begin()), std::make_move_iterator(tables_.end())}; }

 private:
  std::deque<ResultTable> tables_;
};

ResultTable make_table(std::string description, std::vector<std::string> columns, std::size_t keys, std::string x,
                       std::vector<std::string> y, nlohmann::json meta = nlohmann::json::object()) {
  ResultTable t;
  t.description = std::move(description);
  t.columns = std::move(columns);
  t.key_columns = keys;
  t.x = std::move(x);
  t.y = std::move(y);
  t.meta = std::move(meta);
  return t;
}

// -----------------------------------------------------------------------------

void husimi_tables(const ScenarioConfig& c, bool tat, unsigned threads, TableSet& out) {
  std::vector<double> chi_ts = c.husimi.chi_t;
  std::optional<MultiGhzFit> fit;
  if (tat && c.husimi.search) {
    const auto grid = c.husimi.search->points();
    fit = find_multi_ghz_time(c.n_spins, grid);
    auto& t = out.get("multi_ghz_fit", [] {
      return make_table("Located multi-GHZ twisting angle and phase-optimized fidelity",
                        {"chi_t_star", "fidelity", "phase_x", "phase_y", "phase_z"}, 1, "", {});
    });
    t.add_row({fit->chi_t_star, fit->fidelity_star, fit->phases[0], fit->phases[1], fit->phases[2]});
    chi_ts.push_back(fit->chi_t_star);
  }
  const std::string prefix = tat ? "husimi_tat" : "husimi_oat";
  std::vector<SymmetricState> states(chi_ts.size());
  std::vector<SphereGrid> grids(chi_ts.size());
  const SymmetricState ghz = tat ? ghz_axis(c.n_spins, Axis::z) : SymmetricState{};
  parallel_for(chi_ts.size(), threads, [&](std::size_t i) {
    states[i] = tat ? tat_evolve(ghz, TwistingKind::tat_minus, chi_ts[i]) : oat_evolve(c.n_spins, chi_ts[i]);
    grids[i] = husimi(states[i], c.husimi.grid);
  });
  auto& summary = out.get(prefix + "_summary", [&] {
    return make_table("Per-panel normalization and extremal Dicke populations",
                      {"panel", "chi_t", "normalization", "p_up", "p_down", "q_max", "multi_ghz_fidelity"}, 1,
                      "chi_t", {"normalization"});
  });
  for (std::size_t i = 0; i < chi_ts.size(); ++i) {
    const auto& g = grids[i];
    const Vec& a = states[i].amplitudes;
    const double mg = c.n_spins >= 2 ? multi_ghz_overlap(states[i]).fidelity_star : 0.0;
    summary.add_row({static_cast<std::int64_t>(i), chi_ts[i], g.normalization(), std::norm(a(0)),
                     std::norm(a(a.size() - 1)), g.values.maxCoeff(), mg});
    nlohmann::json meta = {{"chi_t", chi_ts[i]}, {"panel", i}, {"n_theta", g.thetas.size()}, {"n_phi", g.phis.size()}};
    if (fit && i + 1 == chi_ts.size()) meta["multi_ghz_time"] = true;
    auto& t = out.get(prefix + "_" + std::to_string(i), [&] {
      return make_table("Husimi Q on the sphere", {"theta", "phi", "q"}, 2, "phi", {"q"}, meta);
    });
    for (std::size_t r = 0; r < g.thetas.size(); ++r) {
      for (std::size_t k = 0; k < g.phis.size(); ++k) {
        t.add_row({g.thetas[r], g.phis[k], g.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k))});
      }
    }
  }
}

void curve_tables(const ScenarioConfig& c, bool with_q, unsigned threads, TableSet& out) {
  const auto points = control_points(c);
  const auto grid = with_origin(c.time_grid.points());
  struct Job {
    std::size_t case_index;
    std::optional<ControlPoint> cp;
    QfiCurve curve;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < c.cases.size(); ++i) {
    for (const auto& cp : points) jobs.push_back({i, cp, {}});
  }
  parallel_for(jobs.size(), threads, [&](std::size_t j) {
    jobs[j].curve = qfi_curve(problem_for(c, c.cases[jobs[j].case_index], jobs[j].cp), grid);
  });
  for (const auto& job : jobs) {
    const auto& cs = c.cases[job.case_index];
    const std::string stem = table_stem(with_q ? "qfi" : "gain", cs, c, job.cp);
    auto& t = out.get(stem, [&] {
      std::vector<std::string> cols = {"chi", "t"};
      if (with_q) cols.push_back("Q");
      cols.push_back("G");
      return make_table(with_q ? "Quantum Fisher information and gain versus time" : "Metrological gain versus time",
                        cols, 2, "t", with_q ? std::vector<std::string>{"Q", "G"} : std::vector<std::string>{"G"},
                        case_meta(cs, c, job.cp));
    });
    const double chi = job.cp ? job.cp->chi : 0.0;
    for (std::size_t i = 0; i < job.curve.times.size(); ++i) {
      const double t_i = job.curve.times[i];
      if (t_i <= 0.0) continue;
      const double q = job.curve.values[i];
      if (with_q) {
        t.add_row({chi, t_i, q, q / (t_i * t_i)});
      } else {
        t.add_row({chi, t_i, q / (t_i * t_i)});
      }
    }
  }
}

void n_scan_tables(const ScenarioConfig& c, unsigned threads, TableSet& out) {
  const auto grid = c.time_grid.points();
  std::vector<std::pair<std::size_t, int>> jobs;
  for (std::size_t i = 0; i < c.cases.size(); ++i) {
    for (int n : c.n_list) jobs.emplace_back(i, n);
  }
  std::vector<ScanResult> results(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t j) {
    SensingProblem p = c.problem(c.cases[jobs[j].first]);
    p.n_spins = jobs[j].second;
    results[j] = scan_optimal_time(p, grid);
  });
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto& cs = c.cases[jobs[j].first];
    auto& t = out.get("nscan_" + sanitize(cs.label), [&] {
      return make_table("Maximum QFI, optimal time and maximum gain versus N", {"N", "Q_max", "t_opt", "G_max"}, 1,
                        "N", {"Q_max", "t_opt", "G_max"}, case_meta(cs, c, std::nullopt));
    });
    const auto& r = results[j];
    t.add_row({static_cast<std::int64_t>(r.n_spins), r.q_max, r.t_opt, r.g_max});
  }
}

void control_sweep_tables(const ScenarioConfig& c, unsigned threads, TableSet& out) {
  const auto points = control_points(c);
  const auto grid = with_origin(c.time_grid.points());
  struct Job {
    std::size_t case_index;
    ControlPoint cp;
    GainCurve gain;
    double integral = 0.0;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < c.cases.size(); ++i) {
    for (const auto& cp : points) jobs.push_back({i, *cp, {}, 0.0});
  }
  parallel_for(jobs.size(), threads, [&](std::size_t j) {
    const SensingProblem p = problem_for(c, c.cases[jobs[j].case_index], jobs[j].cp);
    jobs[j].gain = gain_curve(qfi_curve(p, grid));
    jobs[j].integral = integrated_gain(with_origin(jobs[j].gain, gain_at_origin(p)), c.integration_t_max);
  });
  for (const auto& job : jobs) {
    const auto& cs = c.cases[job.case_index];
    const std::optional<ControlPoint> cp = job.cp;
    auto& g = out.get(table_stem("gain", cs, c, cp), [&] {
      return make_table("Metrological gain versus time for each control strength", {"chi", "t", "G"}, 2, "t", {"G"},
                        case_meta(cs, c, cp));
    });
    for (std::size_t i = 0; i < job.gain.times.size(); ++i) g.add_row({job.cp.chi, job.gain.times[i], job.gain.values[i]});
    auto& ig = out.get(table_stem("integrated_gain", cs, c, cp), [&] {
      auto meta = case_meta(cs, c, cp);
      meta["t_max"] = c.integration_t_max;
      return make_table("Integrated gain versus control strength", {"chi", "I"}, 1, "chi", {"I"}, meta);
    });
    ig.add_row({job.cp.chi, job.integral});
  }
}

Eigen::MatrixXd weight_matrix(const ScenarioConfig& c) {
  Eigen::MatrixXd w(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) w(i, k) = c.weight[i][k];
  }
  return w;
}

void qcrb_tables(const ScenarioConfig& c, bool controlled, unsigned threads, TableSet& out) {
  const auto points = control_points(c);
  const auto grid = with_origin(c.time_grid.points());
  const Eigen::MatrixXd w = weight_matrix(c);
  struct Row {
    double t;
    QcrbResult bound;
    Eigen::MatrixXd q;
    Eigen::MatrixXd incompatibility;
  };
  struct Job {
    std::size_t case_index;
    std::optional<ControlPoint> cp;
    std::vector<Row> rows;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < c.cases.size(); ++i) {
    if (controlled) {
      for (const auto& cp : points) jobs.push_back({i, cp, {}});
    } else {
      jobs.push_back({i, std::nullopt, {}});
    }
  }
  parallel_for(jobs.size(), threads, [&](std::size_t j) {
    const SensingProblem p = problem_for(c, c.cases[jobs[j].case_index], jobs[j].cp);
    for (const auto& b : sensitivities(p, grid)) {
      if (b.time <= 0.0) continue;
      const Eigen::MatrixXd q = qfim(b.state, b.partials, p.eigen_cutoff);
      Row row{b.time, weighted_qcrb(q, w, c.repetitions, c.tolerances.pinv_cutoff), q, {}};
      if (!controlled) row.incompatibility = sld_and_compatibility(b.state, b.partials, p.eigen_cutoff).incompatibility;
      jobs[j].rows.push_back(std::move(row));
    }
  });
  for (const auto& job : jobs) {
    const auto& cs = c.cases[job.case_index];
    if (!controlled) {
      auto& t = out.get("qcrb_" + sanitize(cs.label), [&] {
        return make_table("Weighted quantum Cramer-Rao bound Tr(W Q^-1)/M versus time",
                          {"t", "bound", "condition_number", "rank", "Q_xx", "Q_xy", "Q_xz", "Q_yy", "Q_yz", "Q_zz",
                           "incompat_xy", "incompat_xz", "incompat_yz"},
                          1, "t", {"bound"}, case_meta(cs, c, std::nullopt));
      });
      for (const auto& r : job.rows) {
        t.add_row({r.t, r.bound.bound, r.bound.condition_number, static_cast<std::int64_t>(r.bound.rank), r.q(0, 0),
                   r.q(0, 1), r.q(0, 2), r.q(1, 1), r.q(1, 2), r.q(2, 2), r.incompatibility(0, 1),
                   r.incompatibility(0, 2), r.incompatibility(1, 2)});
      }
      continue;
    }
    const double chi = job.cp->chi;
    auto& t = out.get(table_stem("qcrb", cs, c, job.cp), [&] {
      return make_table("Weighted quantum Cramer-Rao bound versus time for each control strength",
                        {"chi", "t", "bound", "condition_number"}, 2, "t", {"bound"}, case_meta(cs, c, job.cp));
    });
    std::size_t best = 0;
    for (std::size_t i = 0; i < job.rows.size(); ++i) {
      t.add_row({chi, job.rows[i].t, job.rows[i].bound.bound, job.rows[i].bound.condition_number});
      if (job.rows[i].bound.bound < job.rows[best].bound.bound) best = i;
    }
    auto& m = out.get(table_stem("qcrb_min", cs, c, job.cp), [&] {
      return make_table("Minimum of the weighted bound over the time grid", {"chi", "min_bound", "t_min"}, 1, "chi",
                        {"min_bound"}, case_meta(cs, c, job.cp));
    });
    if (!job.rows.empty()) m.add_row({chi, job.rows[best].bound.bound, job.rows[best].t});
  }
}

void bloch_tables(const ScenarioConfig& c, unsigned threads, TableSet& out) {
  const auto points = control_points(c);
  const auto grid = with_origin(c.time_grid.points());
  struct Job {
    std::size_t case_index;
    std::optional<ControlPoint> cp;
    std::vector<DensityMatrix> states;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < c.cases.size(); ++i) {
    for (const auto& cp : points) jobs.push_back({i, cp, {}});
  }
  parallel_for(jobs.size(), threads, [&](std::size_t j) {
    const SensingProblem p = problem_for(c, c.cases[jobs[j].case_index], jobs[j].cp);
    const auto model = make_model(p.resolved_representation(), 1, p.hamiltonian, p.channels);
    jobs[j].states = evolve(*model, model->encode(p.probe.make(1)), grid, p.integrator);
  });
  for (const auto& job : jobs) {
    const auto& cs = c.cases[job.case_index];
    auto& t = out.get(table_stem("bloch", cs, c, job.cp), [&] {
      return make_table("Single-spin Bloch vector versus time", {"chi", "t", "rx", "ry", "rz"}, 2, "t",
                        {"rx", "ry", "rz"}, case_meta(cs, c, job.cp));
    });
    const double chi = job.cp ? job.cp->chi : 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const BlochVector r = bloch_vector(job.states[i]);
      t.add_row({chi, grid[i], r.x, r.y, r.z});
    }
  }
}

void matrix_tables(const ScenarioConfig& c, unsigned threads, TableSet& out) {
  std::vector<double> times = c.snapshot_times;
  times.push_back(0.0);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  std::vector<std::vector<DensityMatrix>> states(c.cases.size());
  parallel_for(c.cases.size(), threads, [&](std::size_t i) {
    const SensingProblem p = c.problem(c.cases[i]);
    const auto model = make_model(p.resolved_representation(), p.n_spins, p.hamiltonian, p.channels);
    states[i] = evolve(*model, model->encode(p.probe.make(p.n_spins)), times, p.integrator);
  });
  for (std::size_t i = 0; i < c.cases.size(); ++i) {
    const auto& cs = c.cases[i];
    auto& t = out.get("matrix_" + sanitize(cs.label), [&] {
      return make_table("Density-matrix elements in the j = N/2 Dicke block at snapshot times",
                        {"t", "row", "col", "row_label", "col_label", "re", "im"}, 3, "col", {"re", "im"},
                        case_meta(cs, c, std::nullopt));
    });
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (std::find(c.snapshot_times.begin(), c.snapshot_times.end(), times[k]) == c.snapshot_times.end() &&
          times[k] != 0.0) {
        continue;
      }
      const auto snap = matrix_snapshot(states[i][k], times[k], cs.label, SnapshotBasis::dicke);
      for (Eigen::Index r = 0; r < snap.values.rows(); ++r) {
        for (Eigen::Index col = 0; col < snap.values.cols(); ++col) {
          const cd v = snap.values(r, col);
          t.add_row({times[k], static_cast<std::int64_t>(r), static_cast<std::int64_t>(col),
                     snap.labels[static_cast<std::size_t>(r)], snap.labels[static_cast<std::size_t>(col)], v.real(),
                     v.imag()});
        }
      }
    }
  }
}

std::string tolerance_text(const Tolerances& t) {
  return "rtol=" + format_number(t.rtol) + " atol=" + format_number(t.atol) +
         " eigen_cutoff=" + format_number(t.eigen_cutoff) + " pinv_cutoff=" + format_number(t.pinv_cutoff);
}

}  // namespace

std::vector<ResultTable> compute_tables(const ScenarioConfig& config, unsigned threads) {
  const auto diagnostics = physics_diagnostics(config);
  if (!diagnostics.empty()) throw ConfigError(diagnostics);
  TableSet set;
  switch (config.kind) {
    case ScenarioKind::husimi_oat: husimi_tables(config, false, threads, set); break;
    case ScenarioKind::husimi_tat: husimi_tables(config, true, threads, set); break;
    case ScenarioKind::qfi_curve: curve_tables(config, true, threads, set); break;
    case ScenarioKind::gain_curve: curve_tables(config, false, threads, set); break;
    case ScenarioKind::n_scan: n_scan_tables(config, threads, set); break;
    case ScenarioKind::control_sweep: control_sweep_tables(config, threads, set); break;
    case ScenarioKind::qcrb_curve: qcrb_tables(config, false, threads, set); break;
    case ScenarioKind::qcrb_control: qcrb_tables(config, true, threads, set); break;
    case ScenarioKind::bloch_single: bloch_tables(config, threads, set); break;
    case ScenarioKind::matrix_movie: matrix_tables(config, threads, set); break;
  }
  auto tables = set.take();
  std::sort(tables.begin(), tables.end(), [](const ResultTable& a, const ResultTable& b) { return a.name < b.name; });
  for (auto& t : tables) {
    t.sort_rows();
    t.check_finite();
  }
  return tables;
}

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  const auto tables = compute_tables(config, options.threads);
  RunResult result;
  result.directory = options.out_root / (config.output.empty() ? config.name : config.output);
  Provenance prov{config.name, to_string(config.kind), config_hash(config), engine_version(),
                  tolerance_text(config.tolerances)};

  nlohmann::json manifest = {{"scenario", config.name},
                             {"kind", to_string(config.kind)},
                             {"description", config.description},
                             {"config_hash", "fnv1a64:" + prov.config_hash},
                             {"engine_version", prov.engine_version},
                             {"n_spins", config.n_spins},
                             {"config", "config.json"}};
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& t : tables) {
    const std::string file = t.name + ".csv";
    write_atomic(result.directory / file, render_csv(t, prov));
    result.files.push_back(result.directory / file);
    entries.push_back({{"name", t.name},
                       {"file", file},
                       {"description", t.description},
                       {"columns", t.columns},
                       {"rows", t.rows.size()},
                       {"x", t.x},
                       {"y", t.y},
                       {"meta", t.meta}});
  }
  manifest["tables"] = entries;
  write_atomic(result.directory / "config.json", to_json(config).dump(2) + "\n");
  result.files.push_back(result.directory / "config.json");
  result.manifest = result.directory / "manifest.json";
  write_atomic(result.manifest, manifest.dump(2) + "\n");
  return result;
}

}  // namespace collspin::experiments
