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

// Quantum Fisher information, its matrix generalization, weighted Cramer-Rao
// bounds, and the time and spin-number scans built on them.

#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "collspin/liouville.hpp"
#include "collspin/prep.hpp"

namespace collspin {

inline constexpr double kDefaultEigenCutoff = 1e-12;

/// 2 sum_{k,l: lambda_k + lambda_l > cutoff} |<k|drho|l>|^2 / (lambda_k + lambda_l).
double qfi(const Mat& rho, const Mat& drho, double eigen_cutoff = kDefaultEigenCutoff);
double qfi(const BlockOperator& rho, const BlockOperator& drho, double eigen_cutoff = kDefaultEigenCutoff);

/// Real symmetric Fisher matrix. The diagonal is computed by the same code
/// path as qfi.
Eigen::MatrixXd qfim(const Mat& rho, std::span<const Mat> partials, double eigen_cutoff = kDefaultEigenCutoff);
Eigen::MatrixXd qfim(const BlockOperator& rho, std::span<const BlockOperator> partials,
                     double eigen_cutoff = kDefaultEigenCutoff);

/// Pure-state Fisher information 4(<dpsi|dpsi> - |<psi|dpsi>|^2).
double pure_state_qfi(const Vec& psi, const Vec& dpsi);

struct SldSet {
  /// One block-diagonal Hermitian operator per parameter.
  std::vector<BlockOperator> operators;
  /// |Tr(rho [L_mu, L_nu])|, zero on the diagonal.
  Eigen::MatrixXd incompatibility;
};

SldSet sld_and_compatibility(const BlockOperator& rho, std::span<const BlockOperator> partials,
                             double eigen_cutoff = kDefaultEigenCutoff);

/// || drho - (L rho + rho L) / 2 ||_F restricted to the support of rho.
double sld_residual(const BlockOperator& rho, const BlockOperator& drho, const BlockOperator& sld,
                    double eigen_cutoff = kDefaultEigenCutoff);

struct QcrbResult {
  /// Tr(W Q^+) / M, or +infinity when Q vanishes below the cutoff.
  double bound = std::numeric_limits<double>::infinity();
  double condition_number = std::numeric_limits<double>::infinity();
  int rank = 0;
  std::string diagnostic;
};

QcrbResult weighted_qcrb(const Eigen::MatrixXd& q, const Eigen::MatrixXd& weight, int repetitions = 1,
                         double pinv_cutoff = 1e-10);

struct QfiCurve {
  std::vector<double> times;
  std::vector<double> values;
};

struct GainCurve {
  std::vector<double> times;
  std::vector<double> values;
};

/// G = Q / t^2 at every sample with t > 0.
GainCurve gain_curve(const QfiCurve& q);

/// Composite trapezoid over the samples with t <= t_max.
double integrated_gain(const GainCurve& g, double t_max = 50.0);

enum class Propagation { ode, exact };

/// One sensing run: probe, Hamiltonian with its estimated parameters, noise.
struct SensingProblem {
  int n_spins = 2;
  std::optional<Representation> representation;  // chosen automatically when empty
  HamiltonianSpec hamiltonian = HamiltonianSpec::field_z();
  std::vector<NoiseChannelSpec> channels;
  ProbeSpec probe;
  IntegratorOptions integrator;
  double eigen_cutoff = kDefaultEigenCutoff;
  Propagation propagation = Propagation::ode;

  Representation resolved_representation() const;
};

/// lim_{t->0} Q(t)/t^2 = 4 Var(O) on the probe, O the operator of the first
/// estimated parameter. Closes the [0, t_1] gap when integrating G from 0.
double gain_at_origin(const SensingProblem& problem);

/// Prepends the sample (0, g0) unless the curve already starts at 0.
GainCurve with_origin(GainCurve g, double g0);

/// Evolves the probe with parameter sensitivities on `times` (which must start
/// at 0).
std::vector<SensitivityBundle> sensitivities(const SensingProblem& problem, std::span<const double> times);

/// Q(t) for the first estimated parameter.
QfiCurve qfi_curve(const SensingProblem& problem, std::span<const double> times);

struct QfimPoint {
  double time = 0.0;
  Eigen::MatrixXd q;
};

std::vector<QfimPoint> qfim_curve(const SensingProblem& problem, std::span<const double> times);

enum class ControlKind { linear_jx, quadratic_jx2, tat_xz };

std::string to_string(ControlKind kind);
ControlKind parse_control_kind(std::string_view text);

/// Adds chi J_x, chi J_x^2 or chi (J_x^2 + J_z^2) to the static Hamiltonian.
HamiltonianSpec with_control(HamiltonianSpec base, ControlKind kind, double chi);

struct ScanResult {
  int n_spins = 0;
  double q_max = 0.0;
  double t_opt = 0.0;
  double g_max = 0.0;
  std::string channel;
};

/// Thrown when the maximum of Q sits on an end of the scanned grid.
class EndpointMaximum : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Grid maximum of Q(t), refined by golden-section search to 1e-4 in t with a
/// fresh evolution per probe point.
ScanResult scan_optimal_time(const SensingProblem& problem, std::span<const double> t_grid);

/// scan_optimal_time for each N, with the probe rebuilt per N.
std::vector<ScanResult> scan_spin_number(const SensingProblem& base, std::span<const int> n_list,
                                         std::span<const double> t_grid, unsigned threads = 0);

}  // namespace collspin
