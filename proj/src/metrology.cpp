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

#include "collspin/metrology.hpp"

#include <algorithm>
#include <cmath>

#include "collspin/numerics.hpp"

namespace collspin {

namespace {

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void check_hermitian(const Mat& m, const char* what) {
  if (m.rows() != m.cols()) throw InvalidArgument(std::string(what) + " is not square");
  const double err = max_abs(m - m.adjoint());
  if (err > 1e-8 * std::max(1.0, max_abs(m))) {
    throw InvalidArgument(std::string(what) + " is not Hermitian (deviation " + std::to_string(err) + ")");
  }
}

struct Eig {
  Eigen::VectorXd values;
  Mat vectors;
};

Eig hermitian_eig(const Mat& m) {
  check_hermitian(m, "density matrix");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
  if (es.info() != Eigen::Success) throw NumericalError("density-matrix eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

void check_cutoff(double cutoff) {
  if (!(cutoff >= 0.0) || !std::isfinite(cutoff)) throw InvalidArgument("eigen cutoff must be finite and >= 0");
}

void check_layout(const BlockOperator& rho, const BlockOperator& other) {
  if (other.blocks.size() != rho.blocks.size()) throw InvalidArgument("partial has a different block layout");
  for (std::size_t b = 0; b < rho.blocks.size(); ++b) {
    if (other.blocks[b].matrix.rows() != rho.blocks[b].matrix.rows() ||
        other.blocks[b].matrix.cols() != rho.blocks[b].matrix.cols()) {
      throw InvalidArgument("partial block dimensions do not match the state");
    }
  }
}

BlockOperator single_block(const Mat& m) {
  BlockOperator op;
  op.representation = Representation::full;
  op.blocks.push_back({-1, 1.0, m});
  return op;
}

}  // namespace

Eigen::MatrixXd qfim(const BlockOperator& rho, std::span<const BlockOperator> partials, double eigen_cutoff) {
  check_cutoff(eigen_cutoff);
  const auto p = static_cast<Eigen::Index>(partials.size());
  for (const auto& d : partials) check_layout(rho, d);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(p, p);
  std::vector<Mat> rotated(partials.size());
  for (std::size_t b = 0; b < rho.blocks.size(); ++b) {
    const Block& block = rho.blocks[b];
    if (block.matrix.size() == 0) continue;
    const Eig eig = hermitian_eig(block.matrix);
    for (std::size_t mu = 0; mu < partials.size(); ++mu) {
      const Mat& d = partials[mu].blocks[b].matrix;
      check_hermitian(d, "state derivative");
      rotated[mu] = eig.vectors.adjoint() * d * eig.vectors;
    }
    const Eigen::Index dim = eig.values.size();
    for (Eigen::Index k = 0; k < dim; ++k) {
      for (Eigen::Index l = 0; l < dim; ++l) {
        const double s = eig.values(k) + eig.values(l);
        if (!(s > eigen_cutoff)) continue;
        const double w = 2.0 * block.multiplicity / s;
        for (Eigen::Index mu = 0; mu < p; ++mu) {
          const cd a = rotated[mu](k, l);
          for (Eigen::Index nu = mu; nu < p; ++nu) q(mu, nu) += w * (a * std::conj(rotated[nu](k, l))).real();
        }
      }
    }
  }
  for (Eigen::Index mu = 0; mu < p; ++mu) {
    for (Eigen::Index nu = 0; nu < mu; ++nu) q(mu, nu) = q(nu, mu);
  }
  return q;
}

Eigen::MatrixXd qfim(const Mat& rho, std::span<const Mat> partials, double eigen_cutoff) {
  std::vector<BlockOperator> wrapped;
  wrapped.reserve(partials.size());
  for (const auto& d : partials) wrapped.push_back(single_block(d));
  return qfim(single_block(rho), wrapped, eigen_cutoff);
}

double qfi(const BlockOperator& rho, const BlockOperator& drho, double eigen_cutoff) {
  return qfim(rho, std::span<const BlockOperator>(&drho, 1), eigen_cutoff)(0, 0);
}

double qfi(const Mat& rho, const Mat& drho, double eigen_cutoff) {
  return qfim(rho, std::span<const Mat>(&drho, 1), eigen_cutoff)(0, 0);
}

double pure_state_qfi(const Vec& psi, const Vec& dpsi) {
  if (psi.size() != dpsi.size()) throw InvalidArgument("state and derivative sizes differ");
  return 4.0 * (dpsi.squaredNorm() - std::norm(psi.dot(dpsi)));
}

SldSet sld_and_compatibility(const BlockOperator& rho, std::span<const BlockOperator> partials, double eigen_cutoff) {
  check_cutoff(eigen_cutoff);
  for (const auto& d : partials) check_layout(rho, d);
  const auto p = static_cast<Eigen::Index>(partials.size());
  SldSet out;
  out.operators.resize(partials.size());
  for (auto& op : out.operators) {
    op.representation = rho.representation;
    op.n_spins = rho.n_spins;
  }
  Eigen::MatrixXcd commutator_traces = Eigen::MatrixXcd::Zero(p, p);
  for (std::size_t b = 0; b < rho.blocks.size(); ++b) {
    const Block& block = rho.blocks[b];
    const Eig eig = block.matrix.size() ? hermitian_eig(block.matrix) : Eig{};
    const Eigen::Index dim = eig.values.size();
    std::vector<Mat> slds(partials.size());
    for (std::size_t mu = 0; mu < partials.size(); ++mu) {
      const Mat d = eig.vectors.adjoint() * partials[mu].blocks[b].matrix * eig.vectors;
      Mat l = Mat::Zero(dim, dim);
      for (Eigen::Index k = 0; k < dim; ++k) {
        for (Eigen::Index m = 0; m < dim; ++m) {
          const double s = eig.values(k) + eig.values(m);
          if (s > eigen_cutoff) l(k, m) = 2.0 * d(k, m) / s;
        }
      }
      slds[mu] = eig.vectors * l * eig.vectors.adjoint();
      out.operators[mu].blocks.push_back({block.two_j, block.multiplicity, slds[mu]});
    }
    for (Eigen::Index mu = 0; mu < p; ++mu) {
      for (Eigen::Index nu = mu + 1; nu < p; ++nu) {
        const Mat comm = slds[mu] * slds[nu] - slds[nu] * slds[mu];
        commutator_traces(mu, nu) += block.multiplicity * (block.matrix * comm).trace();
      }
    }
  }
  out.incompatibility = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index mu = 0; mu < p; ++mu) {
    for (Eigen::Index nu = mu + 1; nu < p; ++nu) {
      out.incompatibility(mu, nu) = out.incompatibility(nu, mu) = std::abs(commutator_traces(mu, nu));
    }
  }
  return out;
}

double sld_residual(const BlockOperator& rho, const BlockOperator& drho, const BlockOperator& sld,
                    double eigen_cutoff) {
  check_layout(rho, drho);
  check_layout(rho, sld);
  double sum = 0.0;
  for (std::size_t b = 0; b < rho.blocks.size(); ++b) {
    const Mat& r = rho.blocks[b].matrix;
    if (r.size() == 0) continue;
    const Eig eig = hermitian_eig(r);
    const Mat& l = sld.blocks[b].matrix;
    const Mat residual = drho.blocks[b].matrix - 0.5 * (l * r + r * l);
    Mat rotated = eig.vectors.adjoint() * residual * eig.vectors;
    for (Eigen::Index k = 0; k < rotated.rows(); ++k) {
      for (Eigen::Index m = 0; m < rotated.cols(); ++m) {
        if (!(eig.values(k) + eig.values(m) > eigen_cutoff)) rotated(k, m) = 0.0;
      }
    }
    sum += rho.blocks[b].multiplicity * rotated.squaredNorm();
  }
  return std::sqrt(sum);
}

QcrbResult weighted_qcrb(const Eigen::MatrixXd& q, const Eigen::MatrixXd& weight, int repetitions,
                         double pinv_cutoff) {
  const Eigen::Index p = q.rows();
  if (q.cols() != p || weight.rows() != p || weight.cols() != p) {
    throw InvalidArgument("Fisher and weight matrices must be square and of equal size");
  }
  if (repetitions < 1) throw InvalidArgument("repetitions must be >= 1");
  if (!(pinv_cutoff >= 0.0)) throw InvalidArgument("pseudo-inverse cutoff must be >= 0");
  if (!q.allFinite() || !weight.allFinite()) throw NumericalError("non-finite Fisher or weight matrix");
  const double wscale = std::max(1.0, weight.cwiseAbs().maxCoeff());
  if ((weight - weight.transpose()).cwiseAbs().maxCoeff() > 1e-12 * wscale) {
    throw InvalidArgument("weight matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> wes(0.5 * (weight + weight.transpose()), Eigen::EigenvaluesOnly);
  if (wes.eigenvalues().minCoeff() < -1e-12 * wscale) throw InvalidArgument("weight matrix is not positive semidefinite");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (q + q.transpose()));
  const Eigen::VectorXd& lambda = es.eigenvalues();
  QcrbResult result;
  const double lambda_max = lambda.maxCoeff();
  if (!(lambda_max > 1e-12)) {
    result.diagnostic = "Fisher matrix vanishes; bound is infinite";
    return result;
  }
  const double threshold = pinv_cutoff * lambda_max;
  Eigen::MatrixXd pinv = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index k = 0; k < p; ++k) {
    if (lambda(k) > threshold) {
      pinv += es.eigenvectors().col(k) * es.eigenvectors().col(k).transpose() / lambda(k);
      ++result.rank;
    }
  }
  const double lambda_min = lambda.minCoeff();
  result.condition_number = lambda_min > 0.0 ? lambda_max / lambda_min : std::numeric_limits<double>::infinity();
  result.bound = (weight * pinv).trace() / repetitions;
  if (result.rank < p) {
    result.diagnostic = "rank-deficient Fisher matrix: pseudo-inverse over " + std::to_string(result.rank) + " of " +
                        std::to_string(p) + " directions";
  }
  return result;
}

GainCurve gain_curve(const QfiCurve& q) {
  if (q.times.size() != q.values.size()) throw InvalidArgument("QFI curve has mismatched columns");
  GainCurve g;
  for (std::size_t i = 0; i < q.times.size(); ++i) {
    if (q.times[i] <= 0.0) continue;
    g.times.push_back(q.times[i]);
    g.values.push_back(q.values[i] / (q.times[i] * q.times[i]));
  }
  return g;
}

double integrated_gain(const GainCurve& g, double t_max) {
  if (g.times.size() != g.values.size()) throw InvalidArgument("gain curve has mismatched columns");
  double sum = 0.0;
  std::size_t used = 0;
  const double limit = t_max * (1.0 + 1e-12);
  for (std::size_t i = 0; i + 1 < g.times.size() && g.times[i + 1] <= limit; ++i) {
    sum += 0.5 * (g.times[i + 1] - g.times[i]) * (g.values[i] + g.values[i + 1]);
    used = i + 2;
  }
  if (used < 2) throw InvalidArgument("integrated gain needs at least two samples up to t_max");
  return sum;
}

double gain_at_origin(const SensingProblem& problem) {
  if (problem.hamiltonian.parameters.empty()) throw InvalidArgument("problem has no estimated parameter");
  const SpMat o = collective_operator(problem.hamiltonian.parameters.front().op, problem.n_spins, Representation::symmetric);
  const Vec psi = problem.probe.make(problem.n_spins).amplitudes;
  const Vec opsi = o * psi;
  const double mean = psi.dot(opsi).real();
  return 4.0 * (opsi.squaredNorm() - mean * mean);
}

GainCurve with_origin(GainCurve g, double g0) {
  if (!g.times.empty() && g.times.front() <= 0.0) return g;
  g.times.insert(g.times.begin(), 0.0);
  g.values.insert(g.values.begin(), g0);
  return g;
}

Representation SensingProblem::resolved_representation() const {
  return representation.value_or(auto_representation(n_spins, channels));
}

std::vector<SensitivityBundle> sensitivities(const SensingProblem& problem, std::span<const double> times) {
  const auto model = make_model(problem.resolved_representation(), problem.n_spins, problem.hamiltonian,
                                problem.channels);
  const Vec x0 = model->encode(problem.probe.make(problem.n_spins));
  if (problem.propagation == Propagation::ode) return evolve_with_sensitivities(*model, x0, times, problem.integrator);

  const auto states = propagate_exact(*model, x0, times, true);
  const Eigen::Index s = model->state_size();
  std::vector<SensitivityBundle> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    out[i].time = times[i];
    out[i].state = model->decode(states[i].head(s));
    out[i].names = model->parameter_names();
    for (std::size_t mu = 0; mu < model->parameter_count(); ++mu) {
      out[i].partials.push_back(model->decode(states[i].segment(static_cast<Eigen::Index>(mu + 1) * s, s)));
    }
  }
  return out;
}

QfiCurve qfi_curve(const SensingProblem& problem, std::span<const double> times) {
  if (problem.hamiltonian.parameters.empty()) throw InvalidArgument("no estimated parameter");
  const auto bundles = sensitivities(problem, times);
  QfiCurve curve;
  for (const auto& b : bundles) {
    curve.times.push_back(b.time);
    curve.values.push_back(qfi(b.state, b.partials.front(), problem.eigen_cutoff));
  }
  return curve;
}

std::vector<QfimPoint> qfim_curve(const SensingProblem& problem, std::span<const double> times) {
  if (problem.hamiltonian.parameters.empty()) throw InvalidArgument("no estimated parameter");
  const auto bundles = sensitivities(problem, times);
  std::vector<QfimPoint> out;
  for (const auto& b : bundles) out.push_back({b.time, qfim(b.state, b.partials, problem.eigen_cutoff)});
  return out;
}

std::string to_string(ControlKind kind) {
  switch (kind) {
    case ControlKind::linear_jx: return "linear_jx";
    case ControlKind::quadratic_jx2: return "quadratic_jx2";
    case ControlKind::tat_xz: return "tat_xz";
  }
  return "?";
}

ControlKind parse_control_kind(std::string_view text) {
  if (text == "linear_jx") return ControlKind::linear_jx;
  if (text == "quadratic_jx2") return ControlKind::quadratic_jx2;
  if (text == "tat_xz") return ControlKind::tat_xz;
  throw InvalidArgument("unknown control kind '" + std::string(text) + "' (expected linear_jx|quadratic_jx2|tat_xz)");
}

HamiltonianSpec with_control(HamiltonianSpec base, ControlKind kind, double chi) {
  if (!std::isfinite(chi)) throw InvalidArgument("control strength must be finite");
  switch (kind) {
    case ControlKind::linear_jx: base.static_terms.push_back({chi, OperatorTag::jx}); break;
    case ControlKind::quadratic_jx2: base.static_terms.push_back({chi, OperatorTag::jx2}); break;
    case ControlKind::tat_xz: base.static_terms.push_back({chi, OperatorTag::jx2_plus_jz2}); break;
  }
  return base;
}

namespace {

std::string channel_label(const std::vector<NoiseChannelSpec>& channels) {
  if (channels.empty()) return "noiseless";
  std::string out;
  for (const auto& c : channels) out += (out.empty() ? "" : "+") + c.tag();
  return out;
}

double qfi_at(const SensingProblem& problem, double t) {
  const double grid[] = {0.0, t};
  return qfi_curve(problem, grid).values.back();
}

}  // namespace

ScanResult scan_optimal_time(const SensingProblem& problem, std::span<const double> t_grid) {
  if (t_grid.size() < 3) throw InvalidArgument("time scan needs at least three grid points");
  std::vector<double> grid;
  if (t_grid.front() > 0.0) grid.push_back(0.0);
  grid.insert(grid.end(), t_grid.begin(), t_grid.end());
  const QfiCurve curve = qfi_curve(problem, grid);

  const std::size_t first = grid.front() == 0.0 && grid.size() > 1 && grid[1] > 0.0 ? 1 : 0;
  std::size_t best = first;
  for (std::size_t i = first; i < grid.size(); ++i) {
    if (curve.values[i] > curve.values[best]) best = i;
  }
  if (best == first || best + 1 == grid.size()) {
    throw EndpointMaximum("QFI maximum of " + channel_label(problem.channels) + " at N = " +
                          std::to_string(problem.n_spins) + " lies on the grid end t = " + std::to_string(grid[best]) +
                          "; widen the time grid");
  }
  ScanResult result;
  result.n_spins = problem.n_spins;
  result.channel = channel_label(problem.channels);
  result.q_max = curve.values[best];
  result.t_opt = grid[best];
  const auto refined =
      golden_section_maximize([&](double t) { return qfi_at(problem, t); }, grid[best - 1], grid[best + 1], 1e-4);
  if (refined.value > result.q_max) {
    result.q_max = refined.value;
    result.t_opt = refined.x;
  }
  result.g_max = result.q_max / (result.t_opt * result.t_opt);
  return result;
}

std::vector<ScanResult> scan_spin_number(const SensingProblem& base, std::span<const int> n_list,
                                         std::span<const double> t_grid, unsigned threads) {
  std::vector<ScanResult> out(n_list.size());
  parallel_for(n_list.size(), threads, [&](std::size_t i) {
    SensingProblem p = base;
    p.n_spins = n_list[i];
    out[i] = scan_optimal_time(p, t_grid);
  });
  return out;
}

}  // namespace collspin
