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

// Collective spin-1/2 ensembles: Dicke-basis operators, symmetric-sector
// states, and the product-space operators they embed into.
//
// Conventions used throughout the library:
//  * Symmetric-sector amplitudes are ordered m = j, j-1, ..., -j, so index 0 is
//    the fully polarized |j, j> state.
//  * In the 2^N product space, bit value 0 is spin up (sigma_z = +1). Site n
//    corresponds to bit (N-1-n), i.e. site 0 is the leftmost Kronecker factor.
//    Index 0 is therefore |up up ... up>, matching Dicke index 0.

#pragma once

#include <array>
#include <compare>
#include <string>

#include "collspin/types.hpp"

namespace collspin {

/// Half-integer quantum number stored as twice its value.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  static constexpr HalfInt from_twice(int twice) noexcept {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }
  /// Throws InvalidArgument unless 2*value is an integer.
  static HalfInt from_double(double value);

  constexpr int twice() const noexcept { return twice_; }
  constexpr double value() const noexcept { return 0.5 * twice_; }

  constexpr auto operator<=>(const HalfInt&) const = default;

 private:
  int twice_ = 0;
};

/// Spin j = N/2 of the fully symmetric sector of N spins.
constexpr HalfInt symmetric_spin(int n_spins) noexcept { return HalfInt::from_twice(n_spins); }

struct DickeLabel {
  HalfInt j;
  HalfInt m;

  /// Validates 2j >= 0, |m| <= j and matching parity of 2j and 2m.
  static DickeLabel make(HalfInt j, HalfInt m);
  /// Position of this label in the m = j..-j ordering.
  Eigen::Index index() const noexcept { return (j.twice() - m.twice()) / 2; }
};

struct SymmetricState {
  HalfInt j;
  Vec amplitudes;  // m = j, j-1, ..., -j

  int n_spins() const noexcept { return j.twice(); }
  Eigen::Index dim() const noexcept { return amplitudes.size(); }
  double norm() const { return amplitudes.norm(); }
};

struct CollectiveOperatorSet {
  HalfInt j;
  Mat jx, jy, jz, jplus, jminus, jsq;
};

/// Dense spin-j matrices. Rejects j <= 0.
CollectiveOperatorSet build_collective_ops(HalfInt j);

SymmetricState dicke_state(HalfInt j, HalfInt m);

/// exp(-i phi J_z) exp(-i theta J_y) |j, j>.
SymmetricState spin_coherent_state(HalfInt j, double theta, double phi);

enum class Axis { x, y, z };

std::string to_string(Axis axis);

/// Extremal eigenstate |j, +-j>_axis of J_axis. The phase is fixed by making
/// the largest-magnitude Dicke amplitude real and positive (ties go to the
/// lowest index).
SymmetricState extremal_state(HalfInt j, Axis axis, bool upper);

/// (|j,+j>_axis + e^{i rel_phase} |j,-j>_axis) / sqrt(2). Requires n_spins >= 2.
SymmetricState ghz_axis(int n_spins, Axis axis, double rel_phase = 0.0);

/// Normalized sum of the GHZ states along x, y, z. `component_phases` multiplies
/// each component by e^{i phase} before summing (all zero by default).
SymmetricState multi_ghz(int n_spins, const std::array<double, 3>& component_phases = {});

/// Normalization constant of the unnormalized three-component sum.
double multi_ghz_normalization(int n_spins, const std::array<double, 3>& component_phases = {});

/// <a|b>.
cd inner(const SymmetricState& a, const SymmetricState& b);

// -----------------------------------------------------------------------------
// Product space

inline constexpr int kMaxFullVectorSpins = 14;
inline constexpr int kMaxFullDensitySpins = 12;

double binomial(int n, int k);

/// Amplitude map of the symmetric sector into the 2^N product space.
Vec embed_symmetric(const SymmetricState& state, int n_spins);

/// Isometry whose columns are the embedded Dicke states |N/2, m>.
Mat embedding_isometry(int n_spins);

enum class SiteOp { x, y, z, plus, minus };

struct FullSpaceOperator {
  int n_spins = 0;
  SpMat matrix;
  std::string label;
};

/// sigma_op acting on one site, identity elsewhere.
FullSpaceOperator site_operator(int n_spins, int site, SiteOp op);

/// Collective operator on the product space: J_x, J_y, J_z (= sum sigma/2) or
/// J_+, J_- (= sum sigma_+-).
FullSpaceOperator collective_full(int n_spins, SiteOp op);

}  // namespace collspin
