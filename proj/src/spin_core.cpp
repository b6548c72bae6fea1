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

#include "collspin/spin_core.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <vector>

namespace collspin {

HalfInt HalfInt::from_double(double value) {
  const double twice = 2.0 * value;
  const double rounded = std::round(twice);
  if (!std::isfinite(value) || std::abs(twice - rounded) > 1e-9) {
    throw InvalidArgument("not a half-integer: " + std::to_string(value));
  }
  return from_twice(static_cast<int>(rounded));
}

DickeLabel DickeLabel::make(HalfInt j, HalfInt m) {
  if (j.twice() < 0) throw InvalidArgument("Dicke label needs j >= 0");
  if (std::abs(m.twice()) > j.twice()) throw InvalidArgument("Dicke label needs |m| <= j");
  if ((j.twice() - m.twice()) % 2 != 0) throw InvalidArgument("2j and 2m must share parity");
  return {j, m};
}

CollectiveOperatorSet build_collective_ops(HalfInt j) {
  if (j.twice() <= 0) throw InvalidArgument("collective operators need j > 0");
  const Eigen::Index dim = j.twice() + 1;
  const double jj = j.value();

  CollectiveOperatorSet ops;
  ops.j = j;
  ops.jz = Mat::Zero(dim, dim);
  ops.jplus = Mat::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double m = jj - static_cast<double>(i);
    ops.jz(i, i) = m;
    // J+ |j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>, and m+1 sits at index i-1.
    if (i > 0) ops.jplus(i - 1, i) = std::sqrt(jj * (jj + 1.0) - m * (m + 1.0));
  }
  ops.jminus = ops.jplus.adjoint();
  ops.jx = 0.5 * (ops.jplus + ops.jminus);
  ops.jy = (ops.jplus - ops.jminus) / (2.0 * kI);
  ops.jsq = ops.jx * ops.jx + ops.jy * ops.jy + ops.jz * ops.jz;
  return ops;
}

SymmetricState dicke_state(HalfInt j, HalfInt m) {
  const auto label = DickeLabel::make(j, m);
  SymmetricState s{j, Vec::Zero(j.twice() + 1)};
  s.amplitudes(label.index()) = 1.0;
  return s;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double result = 1.0;
  for (int i = 1; i <= k; ++i) result = result * static_cast<double>(n - k + i) / i;
  return result;
}

SymmetricState spin_coherent_state(HalfInt j, double theta, double phi) {
  if (j.twice() < 0) throw InvalidArgument("spin coherent state needs j >= 0");
  const int two_j = j.twice();
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  SymmetricState out{j, Vec(two_j + 1)};
  for (int i = 0; i <= two_j; ++i) {
    // i counts lowered spins: m = j - i.
    const double m = j.value() - i;
    const double mag = std::sqrt(binomial(two_j, i)) * std::pow(c, two_j - i) * std::pow(s, i);
    out.amplitudes(i) = mag * std::exp(cd(0.0, -m * phi));
  }
  return out;
}

std::string to_string(Axis axis) {
  switch (axis) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

namespace {

void fix_phase(Vec& v) {
  const double max_mag = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= max_mag * (1.0 - 1e-12)) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = std::abs(v(i));
      return;
    }
  }
}

}  // namespace

SymmetricState extremal_state(HalfInt j, Axis axis, bool upper) {
  constexpr double pi = std::numbers::pi;
  SymmetricState s;
  switch (axis) {
    case Axis::z:
      s = dicke_state(j, upper ? j : HalfInt::from_twice(-j.twice()));
      break;
    case Axis::x:
      s = spin_coherent_state(j, pi / 2, upper ? 0.0 : pi);
      break;
    case Axis::y:
      s = spin_coherent_state(j, pi / 2, upper ? pi / 2 : 3 * pi / 2);
      break;
  }
  fix_phase(s.amplitudes);
  return s;
}

SymmetricState ghz_axis(int n_spins, Axis axis, double rel_phase) {
  if (n_spins < 2) throw InvalidArgument("GHZ state needs at least 2 spins");
  const HalfInt j = symmetric_spin(n_spins);
  const auto up = extremal_state(j, axis, true);
  const auto down = extremal_state(j, axis, false);
  SymmetricState s{j, (up.amplitudes + std::exp(cd(0.0, rel_phase)) * down.amplitudes) / std::sqrt(2.0)};
  return s;
}

namespace {

Vec multi_ghz_unnormalized(int n_spins, const std::array<double, 3>& phases) {
  if (n_spins < 2) throw InvalidArgument("multi-GHZ state needs at least 2 spins");
  Vec sum = Vec::Zero(n_spins + 1);
  const std::array<Axis, 3> axes{Axis::x, Axis::y, Axis::z};
  for (std::size_t k = 0; k < axes.size(); ++k) {
    sum += std::exp(cd(0.0, phases[k])) * ghz_axis(n_spins, axes[k]).amplitudes;
  }
  return sum;
}

}  // namespace

double multi_ghz_normalization(int n_spins, const std::array<double, 3>& component_phases) {
  return multi_ghz_unnormalized(n_spins, component_phases).norm();
}

SymmetricState multi_ghz(int n_spins, const std::array<double, 3>& component_phases) {
  Vec v = multi_ghz_unnormalized(n_spins, component_phases);
  const double norm = v.norm();
  if (norm < 1e-12) throw NumericalError("multi-GHZ components cancel");
  return {symmetric_spin(n_spins), v / norm};
}

cd inner(const SymmetricState& a, const SymmetricState& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("inner product of states with different j");
  return a.amplitudes.dot(b.amplitudes);
}

Vec embed_symmetric(const SymmetricState& state, int n_spins) {
  if (n_spins > kMaxFullVectorSpins) {
    throw CapExceeded("product-space vectors are capped at N = " + std::to_string(kMaxFullVectorSpins));
  }
  if (state.j.twice() != n_spins) throw InvalidArgument("state is not in the N/2 sector");
  const std::size_t dim = std::size_t{1} << n_spins;
  Vec out(static_cast<Eigen::Index>(dim));
  std::vector<double> weight(n_spins + 1);
  for (int k = 0; k <= n_spins; ++k) weight[k] = 1.0 / std::sqrt(binomial(n_spins, k));
  for (std::size_t s = 0; s < dim; ++s) {
    const int down = std::popcount(s);
    out(static_cast<Eigen::Index>(s)) = state.amplitudes(down) * weight[down];
  }
  return out;
}

Mat embedding_isometry(int n_spins) {
  const HalfInt j = symmetric_spin(n_spins);
  Mat iso(Eigen::Index{1} << n_spins, n_spins + 1);
  for (int k = 0; k <= n_spins; ++k) {
    iso.col(k) = embed_symmetric(dicke_state(j, HalfInt::from_twice(n_spins - 2 * k)), n_spins);
  }
  return iso;
}

namespace {

std::string site_op_name(SiteOp op) {
  switch (op) {
    case SiteOp::x: return "x";
    case SiteOp::y: return "y";
    case SiteOp::z: return "z";
    case SiteOp::plus: return "+";
    case SiteOp::minus: return "-";
  }
  return "?";
}

void check_full_size(int n_spins) {
  if (n_spins < 1) throw InvalidArgument("need at least one spin");
  if (n_spins > kMaxFullVectorSpins) {
    throw CapExceeded("product-space operators are capped at N = " + std::to_string(kMaxFullVectorSpins));
  }
}

// Appends coefficient * sigma_op on `site` into the triplet list.
void append_site(std::vector<Eigen::Triplet<cd>>& triplets, int n_spins, int site, SiteOp op, double coefficient) {
  const std::size_t dim = std::size_t{1} << n_spins;
  const std::size_t mask = std::size_t{1} << (n_spins - 1 - site);
  for (std::size_t s = 0; s < dim; ++s) {
    const bool down = (s & mask) != 0;
    const auto col = static_cast<Eigen::Index>(s);
    const auto flipped = static_cast<Eigen::Index>(s ^ mask);
    switch (op) {
      case SiteOp::z:
        triplets.emplace_back(col, col, coefficient * (down ? -1.0 : 1.0));
        break;
      case SiteOp::x:
        triplets.emplace_back(flipped, col, coefficient);
        break;
      case SiteOp::y:
        // sigma_y |up> = i |down>, sigma_y |down> = -i |up>.
        triplets.emplace_back(flipped, col, coefficient * (down ? -kI : kI));
        break;
      case SiteOp::plus:
        if (down) triplets.emplace_back(flipped, col, coefficient);
        break;
      case SiteOp::minus:
        if (!down) triplets.emplace_back(flipped, col, coefficient);
        break;
    }
  }
}

}  // namespace

FullSpaceOperator site_operator(int n_spins, int site, SiteOp op) {
  check_full_size(n_spins);
  if (site < 0 || site >= n_spins) throw InvalidArgument("site index out of range");
  const auto dim = Eigen::Index{1} << n_spins;
  std::vector<Eigen::Triplet<cd>> triplets;
  append_site(triplets, n_spins, site, op, 1.0);
  FullSpaceOperator out{n_spins, SpMat(dim, dim), "sigma_" + site_op_name(op) + "^(" + std::to_string(site) + ")"};
  out.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

FullSpaceOperator collective_full(int n_spins, SiteOp op) {
  check_full_size(n_spins);
  const auto dim = Eigen::Index{1} << n_spins;
  const bool ladder = op == SiteOp::plus || op == SiteOp::minus;
  std::vector<Eigen::Triplet<cd>> triplets;
  triplets.reserve(static_cast<std::size_t>(dim) * n_spins);
  for (int site = 0; site < n_spins; ++site) append_site(triplets, n_spins, site, op, ladder ? 1.0 : 0.5);
  FullSpaceOperator out{n_spins, SpMat(dim, dim), "J_" + site_op_name(op)};
  out.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace collspin
