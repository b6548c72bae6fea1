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

// Exact compressed storage for permutation-invariant operators on N spins.
//
// An operator X on (C^2)^{\otimes N} commutes with every site permutation iff
// X(a, b) depends only on the multiset of per-site bit pairs (a_n, b_n). Each
// such multiset (an "orbit") is labelled by the counts (c0, c1, c2, c3) of the
// pair types (up,up), (up,down), (down,up), (down,down), so the operator is
// fully described by C(N+3, 3) numbers. Every collective Hamiltonian and every
// channel in this library (local channels applied uniformly to all sites
// included) maps this subspace into itself, so a permutation-invariant initial
// state can be evolved exactly in orbit coordinates.
//
// The same operators are block diagonal in the Schur-Weyl basis,
//   X = sum_j X_j (x) 1_{d_j},
// and `to_blocks` recovers each (2j+1)-dimensional X_j by sandwiching with one
// representative copy of the spin-j irrep: (N/2 - j) singlets on sites
// (0,1), (2,3), ... followed by a symmetric Dicke state on the remaining 2j
// sites.

#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "collspin/spin_core.hpp"

namespace collspin {

struct OrbitCounts {
  int uu = 0;  // row up, column up
  int ud = 0;  // row up, column down
  int du = 0;  // row down, column up
  int dd = 0;  // row down, column down
};

class PermutationBasis {
 public:
  explicit PermutationBasis(int n_spins);

  /// Cached instance; the block map is expensive to build for N near the cap.
  static std::shared_ptr<const PermutationBasis> shared(int n_spins);

  int n_spins() const noexcept { return n_; }
  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(counts_.size()); }

  Eigen::Index orbit_of(std::uint32_t row, std::uint32_t col) const noexcept;
  const OrbitCounts& counts(Eigen::Index orbit) const { return counts_[static_cast<std::size_t>(orbit)]; }
  std::pair<std::uint32_t, std::uint32_t> representative(Eigen::Index orbit) const;
  /// Number of matrix elements in the orbit.
  double orbit_size(Eigen::Index orbit) const { return sizes_[static_cast<std::size_t>(orbit)]; }
  /// Orbit of the transposed pair (row and column exchanged).
  Eigen::Index adjoint_orbit(Eigen::Index orbit) const { return adjoint_[static_cast<std::size_t>(orbit)]; }

  Vec encode(const SymmetricState& state) const;
  /// From a symmetric-sector matrix (dimension N+1) or a permutation-invariant
  /// product-space matrix (dimension 2^N).
  Vec encode(const Mat& rho) const;
  Mat to_full(const Vec& x) const;

  struct SectorBlock {
    int two_j;
    double multiplicity;
    Mat matrix;
  };
  std::vector<SectorBlock> to_blocks(const Vec& x) const;
  /// Spin values 2j = N, N-2, ..., in block order.
  const std::vector<int>& block_two_j() const noexcept { return block_two_j_; }

  cd trace(const Vec& x) const;
  /// x <- (x + x^dagger) / 2 in orbit coordinates.
  void hermitize(Eigen::Ref<Vec> x) const;

 private:
  void build_block_map();

  int n_;
  std::vector<OrbitCounts> counts_;
  std::vector<double> sizes_;
  std::vector<Eigen::Index> adjoint_;
  std::vector<Eigen::Index> lookup_;  // (ud, du, dd) -> orbit
  std::vector<int> block_two_j_;
  std::vector<double> multiplicity_;
  std::vector<Eigen::Index> block_offset_;  // row offset of each block in block_map_
  Eigen::MatrixXd block_map_;               // stacked column-major block entries x orbits
};

/// Multiplicity of the spin-j irrep in N spin-1/2 particles.
double irrep_multiplicity(int n_spins, int two_j);

}  // namespace collspin
