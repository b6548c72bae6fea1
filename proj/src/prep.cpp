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

#include "collspin/prep.hpp"

#include <cmath>
#include <numbers>

#include "collspin/numerics.hpp"

namespace collspin {

std::string to_string(TwistingKind kind) {
  switch (kind) {
    case TwistingKind::oat: return "oat";
    case TwistingKind::tat_minus: return "tat_minus";
    case TwistingKind::tat_plus: return "tat_plus";
  }
  return "?";
}

std::string to_string(ProbeKind kind) {
  switch (kind) {
    case ProbeKind::ghz: return "ghz";
    case ProbeKind::multi_ghz: return "multi_ghz";
    case ProbeKind::coherent: return "coherent";
    case ProbeKind::dicke: return "dicke";
  }
  return "?";
}

ProbeKind parse_probe_kind(std::string_view text) {
  if (text == "ghz") return ProbeKind::ghz;
  if (text == "multi_ghz") return ProbeKind::multi_ghz;
  if (text == "coherent") return ProbeKind::coherent;
  if (text == "dicke") return ProbeKind::dicke;
  throw InvalidArgument("unknown probe kind '" + std::string(text) + "' (expected ghz|multi_ghz|coherent|dicke)");
}

SymmetricState ProbeSpec::make(int n_spins) const {
  if (n_spins < 1) throw InvalidArgument("probe needs at least one spin");
  const HalfInt j = symmetric_spin(n_spins);
  switch (kind) {
    case ProbeKind::ghz: {
      if (n_spins >= 2) return ghz_axis(n_spins, axis, rel_phase);
      // The same superposition is well defined for one spin; for z it is |+x>.
      const SymmetricState up = extremal_state(j, axis, true);
      const SymmetricState down = extremal_state(j, axis, false);
      return {j, (up.amplitudes + std::exp(kI * rel_phase) * down.amplitudes) / std::sqrt(2.0)};
    }
    case ProbeKind::multi_ghz: return multi_ghz(n_spins, phases);
    case ProbeKind::coherent: return spin_coherent_state(j, theta, phi);
    case ProbeKind::dicke: return dicke_state(j, HalfInt::from_twice(two_m));
  }
  throw InvalidArgument("unknown probe kind");
}

Mat twisting_generator(HalfInt j, TwistingKind kind) {
  const auto ops = build_collective_ops(j);
  switch (kind) {
    case TwistingKind::oat: return ops.jx * ops.jx;
    case TwistingKind::tat_minus: return ops.jx * ops.jx - ops.jy * ops.jy;
    case TwistingKind::tat_plus: return ops.jx * ops.jx + ops.jz * ops.jz;
  }
  throw InvalidArgument("unknown twisting kind");
}

namespace {

void check_finite(double chi_t) {
  if (!std::isfinite(chi_t)) throw InvalidArgument("chi_t must be finite");
}

// exp(-i chi_t G) psi given G = V diag(lambda) V^dagger.
Vec apply_spectral(const Mat& vectors, const Eigen::VectorXd& values, const Vec& psi, double chi_t) {
  Vec coeffs = vectors.adjoint() * psi;
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) coeffs(k) *= std::exp(-kI * (chi_t * values(k)));
  return vectors * coeffs;
}

struct Spectral {
  Mat vectors;
  Eigen::VectorXd values;
};

Spectral diagonalize(HalfInt j, TwistingKind kind) {
  Eigen::SelfAdjointEigenSolver<Mat> es(twisting_generator(j, kind));
  if (es.info() != Eigen::Success) throw NumericalError("twisting generator diagonalization failed");
  return {es.eigenvectors(), es.eigenvalues()};
}

double wrap_phase(double phase) {
  const double two_pi = 2.0 * std::numbers::pi;
  phase = std::fmod(phase, two_pi);
  if (phase <= -std::numbers::pi) phase += two_pi;
  if (phase > std::numbers::pi) phase -= two_pi;
  return phase;
}

}  // namespace

SymmetricState oat_evolve(int n_spins, double chi_t) {
  if (n_spins < 2) throw InvalidArgument("oat_evolve needs at least two spins");
  check_finite(chi_t);
  const HalfInt j = symmetric_spin(n_spins);
  const auto ops = build_collective_ops(j);
  Eigen::SelfAdjointEigenSolver<Mat> es(ops.jx);
  if (es.info() != Eigen::Success) throw NumericalError("J_x diagonalization failed");
  // The J_x spectrum is exactly -j..j; snapping removes eigensolver noise from
  // the phases chi_t m^2.
  Eigen::VectorXd m2 = es.eigenvalues();
  for (Eigen::Index k = 0; k < m2.size(); ++k) {
    const double m = std::round(2.0 * m2(k)) / 2.0;
    m2(k) = m * m;
  }
  const SymmetricState start = dicke_state(j, HalfInt::from_twice(-n_spins));
  return {j, apply_spectral(es.eigenvectors(), m2, start.amplitudes, chi_t)};
}

SymmetricState tat_evolve(const SymmetricState& initial, TwistingKind kind, double chi_t) {
  check_finite(chi_t);
  if (initial.j.twice() <= 0 || initial.dim() != initial.j.twice() + 1) {
    throw InvalidArgument("initial state is not a valid spin-j state");
  }
  if (chi_t == 0.0) return initial;
  const Spectral s = diagonalize(initial.j, kind);
  return {initial.j, apply_spectral(s.vectors, s.values, initial.amplitudes, chi_t)};
}

SymmetricState twist(const SymmetricState& initial, const TwistingSpec& spec) {
  return tat_evolve(initial, spec.kind, spec.chi_t);
}

double fidelity(const SymmetricState& a, const SymmetricState& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("fidelity of states with different dimensions");
  return std::norm(a.amplitudes.dot(b.amplitudes));
}

MultiGhzFit multi_ghz_overlap(const SymmetricState& state) {
  const int n = state.n_spins();
  if (n < 2) throw InvalidArgument("multi-GHZ targets need at least two spins");
  const std::array<SymmetricState, 3> comps = {ghz_axis(n, Axis::x), ghz_axis(n, Axis::y), ghz_axis(n, Axis::z)};
  std::array<cd, 3> a{};
  Eigen::Matrix3cd gram;
  for (int mu = 0; mu < 3; ++mu) {
    a[mu] = inner(comps[mu], state);
    for (int nu = 0; nu < 3; ++nu) gram(mu, nu) = inner(comps[mu], comps[nu]);
  }
  // F = |sum_mu e^{-i th_mu} a_mu|^2 / sum_{mu,nu} e^{i(th_nu - th_mu)} G_{mu nu}
  auto fid = [&](double tx, double ty) {
    const std::array<double, 3> th = {tx, ty, 0.0};
    cd num = 0.0;
    cd den = 0.0;
    for (int mu = 0; mu < 3; ++mu) {
      num += std::exp(-kI * th[mu]) * a[mu];
      for (int nu = 0; nu < 3; ++nu) den += std::exp(kI * (th[nu] - th[mu])) * gram(mu, nu);
    }
    return den.real() > 0.0 ? std::norm(num) / den.real() : 0.0;
  };

  // Projection phases, then a coarse grid, then coordinate refinement.
  const double az = std::arg(a[2]);
  double best_x = std::arg(a[0]) - az, best_y = std::arg(a[1]) - az;
  double best = fid(best_x, best_y);
  constexpr int kCoarse = 48;
  const double h = 2.0 * std::numbers::pi / kCoarse;
  for (int ix = 0; ix < kCoarse; ++ix) {
    for (int iy = 0; iy < kCoarse; ++iy) {
      const double f = fid(ix * h, iy * h);
      if (f > best) {
        best = f;
        best_x = ix * h;
        best_y = iy * h;
      }
    }
  }
  double width = h;
  for (int sweep = 0; sweep < 30 && width > 1e-12; ++sweep) {
    const auto ox = golden_section_maximize([&](double x) { return fid(x, best_y); }, best_x - width, best_x + width, 1e-13);
    if (ox.value >= best) best_x = ox.x, best = ox.value;
    const auto oy = golden_section_maximize([&](double y) { return fid(best_x, y); }, best_y - width, best_y + width, 1e-13);
    if (oy.value >= best) best_y = oy.x, best = oy.value;
    width *= 0.5;
  }
  MultiGhzFit fit;
  fit.fidelity_star = std::min(best, 1.0);
  fit.phases = {wrap_phase(best_x), wrap_phase(best_y), 0.0};
  return fit;
}

MultiGhzFit find_multi_ghz_time(int n_spins, std::span<const double> chi_t_grid) {
  if (n_spins < 2) throw InvalidArgument("multi-GHZ search needs at least two spins");
  if (chi_t_grid.empty()) throw InvalidArgument("chi_t grid is empty");
  for (double x : chi_t_grid) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("chi_t grid values must be finite and non-negative");
  }
  const HalfInt j = symmetric_spin(n_spins);
  const Spectral s = diagonalize(j, TwistingKind::tat_minus);
  const SymmetricState start = ghz_axis(n_spins, Axis::z);
  auto at = [&](double chi_t) {
    return multi_ghz_overlap({j, apply_spectral(s.vectors, s.values, start.amplitudes, chi_t)});
  };

  std::vector<MultiGhzFit> fits(chi_t_grid.size());
  parallel_for(chi_t_grid.size(), 0, [&](std::size_t i) {
    fits[i] = at(chi_t_grid[i]);
    fits[i].chi_t_star = chi_t_grid[i];
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < fits.size(); ++i) {
    if (fits[i].fidelity_star > fits[best].fidelity_star) best = i;
  }
  MultiGhzFit result = fits[best];
  if (chi_t_grid.size() > 1) {
    const double lo = chi_t_grid[best > 0 ? best - 1 : 0];
    const double hi = chi_t_grid[std::min(best + 1, chi_t_grid.size() - 1)];
    const auto opt = golden_section_maximize([&](double t) { return at(t).fidelity_star; }, lo, hi, 1e-6);
    if (opt.value > result.fidelity_star) {
      result = at(opt.x);
      result.chi_t_star = opt.x;
    }
  }
  return result;
}

}  // namespace collspin
