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

#include "collspin/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace collspin {

std::vector<double> clenshaw_curtis_weights(int n_theta) {
  if (n_theta < 2) throw InvalidArgument("need at least two theta nodes");
  const int n = n_theta - 1;
  std::vector<double> w(n_theta);
  const double pi = std::numbers::pi;
  if (n % 2 == 0) {
    w.front() = w.back() = 1.0 / (n * n - 1.0);
  } else {
    w.front() = w.back() = 1.0 / (static_cast<double>(n) * n);
  }
  for (int i = 1; i < n; ++i) {
    const double theta = i * pi / n;
    double v = 1.0;
    for (int k = 1; k <= (n - 1) / 2; ++k) v -= 2.0 * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
    if (n % 2 == 0) v -= std::cos(n * theta) / (static_cast<double>(n) * n - 1.0);
    w[i] = 2.0 * v / n;
  }
  return w;
}

double SphereGrid::normalization() const {
  if (thetas.size() < 2 || phis.empty()) return 0.0;
  const auto w = clenshaw_curtis_weights(static_cast<int>(thetas.size()));
  const double dphi = 2.0 * std::numbers::pi / static_cast<double>(phis.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < thetas.size(); ++i) sum += w[i] * values.row(static_cast<Eigen::Index>(i)).sum();
  return (two_j + 1.0) / (4.0 * std::numbers::pi) * sum * dphi;
}

namespace {

template <typename Eval>
SphereGrid evaluate(int two_j, const SphereGridSpec& spec, Eval&& eval) {
  if (spec.n_theta < 2 || spec.n_phi < 1) throw InvalidArgument("sphere grid needs n_theta >= 2 and n_phi >= 1");
  SphereGrid grid;
  grid.two_j = two_j;
  const double pi = std::numbers::pi;
  for (int i = 0; i < spec.n_theta; ++i) grid.thetas.push_back(i * pi / (spec.n_theta - 1));
  for (int k = 0; k < spec.n_phi; ++k) grid.phis.push_back(2.0 * k * pi / spec.n_phi);
  grid.values.resize(spec.n_theta, spec.n_phi);
  const HalfInt j = HalfInt::from_twice(two_j);
  Vec coherent(two_j + 1);
  for (int i = 0; i < spec.n_theta; ++i) {
    // Amplitudes at phi = 0; the phi dependence is the phase e^{-i m phi}.
    const Vec base = spin_coherent_state(j, grid.thetas[i], 0.0).amplitudes;
    for (int k = 0; k < spec.n_phi; ++k) {
      for (int idx = 0; idx <= two_j; ++idx) {
        const double m = 0.5 * (two_j - 2 * idx);
        coherent(idx) = base(idx) * std::exp(-kI * (m * grid.phis[k]));
      }
      double q = eval(coherent);
      if (q < 0.0 && q > -1e-14) q = 0.0;
      grid.values(i, k) = q;
    }
  }
  return grid;
}

}  // namespace

SphereGrid husimi(const SymmetricState& psi, const SphereGridSpec& spec) {
  if (psi.dim() != psi.j.twice() + 1) throw InvalidArgument("state dimension does not match its spin");
  return evaluate(psi.j.twice(), spec, [&](const Vec& c) { return std::norm(c.dot(psi.amplitudes)); });
}

SphereGrid husimi(const Mat& rho, const SphereGridSpec& spec) {
  if (rho.rows() != rho.cols() || rho.rows() < 2) throw InvalidArgument("husimi needs a square sector matrix");
  const int two_j = static_cast<int>(rho.rows()) - 1;
  return evaluate(two_j, spec, [&](const Vec& c) { return c.dot(rho * c).real(); });
}

int count_phi_maxima(const SphereGrid& grid, double theta) {
  if (grid.thetas.empty() || grid.phis.size() < 3) throw InvalidArgument("grid too small to count maxima");
  std::size_t row = 0;
  for (std::size_t i = 1; i < grid.thetas.size(); ++i) {
    if (std::abs(grid.thetas[i] - theta) < std::abs(grid.thetas[row] - theta)) row = i;
  }
  const Eigen::VectorXd ring = grid.values.row(static_cast<Eigen::Index>(row)).transpose();
  const Eigen::Index n = ring.size();
  const double mean = ring.mean();
  int count = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double prev = ring((k + n - 1) % n);
    const double next = ring((k + 1) % n);
    if (ring(k) > prev && ring(k) >= next && ring(k) > mean) ++count;
  }
  return count;
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

BlochVector bloch_vector(const Mat& rho) {
  if (rho.rows() != 2 || rho.cols() != 2) throw InvalidArgument("Bloch vector needs a 2x2 density matrix");
  BlochVector r;
  r.x = (rho(0, 1) + rho(1, 0)).real();
  r.y = (kI * (rho(0, 1) - rho(1, 0))).real();
  r.z = (rho(0, 0) - rho(1, 1)).real();
  return r;
}

BlochVector bloch_vector(const DensityMatrix& rho) {
  if (rho.n_spins != 1) throw InvalidArgument("Bloch vector needs a single-spin state");
  return bloch_vector(rho.matrix());
}

std::string dicke_label(int two_m) {
  if (two_m == 0) return "0";
  const std::string sign = two_m > 0 ? "+" : "-";
  const int a = std::abs(two_m);
  return a % 2 == 0 ? sign + std::to_string(a / 2) : sign + std::to_string(a) + "/2";
}

MatrixSnapshot matrix_snapshot(const DensityMatrix& rho, double time, std::string tag, SnapshotBasis basis) {
  MatrixSnapshot snap;
  snap.time = time;
  snap.tag = std::move(tag);
  const int n = rho.n_spins;
  auto dicke_labels = [&] {
    for (int two_m = n; two_m >= -n; two_m -= 2) snap.labels.push_back(dicke_label(two_m));
  };
  switch (rho.representation) {
    case Representation::symmetric:
      snap.values = rho.matrix();
      dicke_labels();
      break;
    case Representation::permutation: {
      const auto it = std::find_if(rho.blocks.begin(), rho.blocks.end(), [&](const Block& b) { return b.two_j == n; });
      if (it == rho.blocks.end()) throw InvalidArgument("state has no j = N/2 block");
      snap.values = it->matrix;
      dicke_labels();
      break;
    }
    case Representation::full:
      if (basis == SnapshotBasis::dicke) {
        const Mat iso = embedding_isometry(n);
        snap.values = iso.adjoint() * rho.matrix() * iso;
        dicke_labels();
      } else {
        snap.values = rho.matrix();
        const auto dim = static_cast<std::uint32_t>(snap.values.rows());
        for (std::uint32_t idx = 0; idx < dim; ++idx) {
          std::string label;
          for (int site = 0; site < n; ++site) label += (idx >> (n - 1 - site)) & 1U ? 'd' : 'u';
          snap.labels.push_back(label);
        }
      }
      break;
  }
  return snap;
}

}  // namespace collspin
