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

// Husimi distributions on the sphere, single-spin Bloch vectors and density
// matrix snapshots.

#pragma once

#include <string>
#include <vector>

#include "collspin/liouville.hpp"

namespace collspin {

struct SphereGridSpec {
  int n_theta = 101;  // uniform on [0, pi], both poles included
  int n_phi = 201;    // uniform on [0, 2 pi), periodic
};

struct SphereGrid {
  int two_j = 0;
  std::vector<double> thetas;
  std::vector<double> phis;
  Eigen::MatrixXd values;  // n_theta x n_phi

  /// (2j+1)/(4 pi) times the sphere integral of Q; 1 for a normalized state.
  double normalization() const;
};

/// Clenshaw-Curtis weights for the integral of f(theta) sin(theta) over
/// [0, pi] on the nodes theta_i = i pi / (n - 1).
std::vector<double> clenshaw_curtis_weights(int n_theta);

/// Q(theta, phi) = |<theta, phi|psi>|^2.
SphereGrid husimi(const SymmetricState& psi, const SphereGridSpec& spec = {});
/// Q(theta, phi) = <theta, phi|rho|theta, phi> for a symmetric-sector rho.
SphereGrid husimi(const Mat& rho, const SphereGridSpec& spec = {});

/// Strict cyclic local maxima along phi at the theta row closest to `theta`
/// that rise above the row mean.
int count_phi_maxima(const SphereGrid& grid, double theta);

struct BlochVector {
  double x = 0.0, y = 0.0, z = 0.0;
  double norm() const;
};

/// r_mu = Tr(rho sigma_mu) for a 2x2 density matrix with index 0 = spin up.
BlochVector bloch_vector(const Mat& rho);
BlochVector bloch_vector(const DensityMatrix& rho);

enum class SnapshotBasis {
  native,  // Dicke order for sector states, computational order for the full space
  dicke,   // projection onto the j = N/2 sector
};

struct MatrixSnapshot {
  double time = 0.0;
  std::string tag;
  std::vector<std::string> labels;
  Mat values;
};

/// Permutation-invariant states are always exported as their j = N/2 block.
MatrixSnapshot matrix_snapshot(const DensityMatrix& rho, double time, std::string tag,
                               SnapshotBasis basis = SnapshotBasis::native);

/// "+3/2", "0", "-1", ...
std::string dicke_label(int two_m);

}  // namespace collspin
