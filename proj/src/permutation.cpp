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

#include "collspin/permutation.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <mutex>

namespace collspin {

double irrep_multiplicity(int n_spins, int two_j) {
  if (two_j < 0 || two_j > n_spins || (n_spins - two_j) % 2 != 0) return 0.0;
  const int k = (n_spins - two_j) / 2;
  return binomial(n_spins, k) - binomial(n_spins, k - 1);
}

PermutationBasis::PermutationBasis(int n_spins) : n_(n_spins) {
  if (n_spins < 1) throw InvalidArgument("permutation basis needs at least one spin");
  if (n_spins > kMaxFullDensitySpins) {
    throw CapExceeded("product-space density matrices are capped at N = " + std::to_string(kMaxFullDensitySpins));
  }
  const int side = n_ + 1;
  lookup_.assign(static_cast<std::size_t>(side * side * side), -1);
  for (int ud = 0; ud <= n_; ++ud) {
    for (int du = 0; du <= n_ - ud; ++du) {
      for (int dd = 0; dd <= n_ - ud - du; ++dd) {
        const OrbitCounts c{n_ - ud - du - dd, ud, du, dd};
        lookup_[static_cast<std::size_t>((ud * side + du) * side + dd)] = static_cast<Eigen::Index>(counts_.size());
        counts_.push_back(c);
        sizes_.push_back(binomial(n_, c.uu) * binomial(n_ - c.uu, c.ud) * binomial(n_ - c.uu - c.ud, c.du));
      }
    }
  }
  adjoint_.resize(counts_.size());
  for (std::size_t o = 0; o < counts_.size(); ++o) {
    const auto& c = counts_[o];
    adjoint_[o] = lookup_[static_cast<std::size_t>((c.du * side + c.ud) * side + c.dd)];
  }
  build_block_map();
}

std::shared_ptr<const PermutationBasis> PermutationBasis::shared(int n_spins) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const PermutationBasis>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n_spins];
  if (!slot) slot = std::make_shared<const PermutationBasis>(n_spins);
  return slot;
}

Eigen::Index PermutationBasis::orbit_of(std::uint32_t row, std::uint32_t col) const noexcept {
  const std::uint32_t mask = (std::uint32_t{1} << n_) - 1;
  const int dd = std::popcount(row & col);
  const int du = std::popcount(row & ~col & mask);
  const int ud = std::popcount(~row & col & mask);
  const int side = n_ + 1;
  return lookup_[static_cast<std::size_t>((ud * side + du) * side + dd)];
}

std::pair<std::uint32_t, std::uint32_t> PermutationBasis::representative(Eigen::Index orbit) const {
  const auto& c = counts(orbit);
  std::uint32_t row = 0, col = 0;
  int site = c.uu;
  auto set = [&](std::uint32_t& word, int s) { word |= std::uint32_t{1} << (n_ - 1 - s); };
  for (int i = 0; i < c.ud; ++i, ++site) set(col, site);
  for (int i = 0; i < c.du; ++i, ++site) set(row, site);
  for (int i = 0; i < c.dd; ++i, ++site) {
    set(row, site);
    set(col, site);
  }
  return {row, col};
}

Vec PermutationBasis::encode(const SymmetricState& state) const {
  if (state.n_spins() != n_) throw InvalidArgument("state is not in the N/2 sector");
  Vec x(size());
  for (Eigen::Index o = 0; o < size(); ++o) {
    const auto& c = counts(o);
    const int row_down = c.du + c.dd;
    const int col_down = c.ud + c.dd;
    x(o) = state.amplitudes(row_down) * std::conj(state.amplitudes(col_down)) /
           std::sqrt(binomial(n_, row_down) * binomial(n_, col_down));
  }
  return x;
}

Vec PermutationBasis::encode(const Mat& rho) const {
  const Eigen::Index full_dim = Eigen::Index{1} << n_;
  Vec x(size());
  if (rho.rows() == full_dim && rho.cols() == full_dim) {
    for (Eigen::Index o = 0; o < size(); ++o) {
      const auto [r, c] = representative(o);
      x(o) = rho(r, c);
    }
    return x;
  }
  if (rho.rows() == n_ + 1 && rho.cols() == n_ + 1) {
    for (Eigen::Index o = 0; o < size(); ++o) {
      const auto& c = counts(o);
      const int row_down = c.du + c.dd;
      const int col_down = c.ud + c.dd;
      x(o) = rho(row_down, col_down) / std::sqrt(binomial(n_, row_down) * binomial(n_, col_down));
    }
    return x;
  }
  throw InvalidArgument("matrix dimension matches neither the symmetric sector nor the product space");
}

Mat PermutationBasis::to_full(const Vec& x) const {
  const std::uint32_t dim = std::uint32_t{1} << n_;
  Mat rho(dim, dim);
  for (std::uint32_t c = 0; c < dim; ++c) {
    for (std::uint32_t r = 0; r < dim; ++r) rho(r, c) = x(orbit_of(r, c));
  }
  return rho;
}

void PermutationBasis::build_block_map() {
  for (int two_j = n_; two_j >= 0; two_j -= 2) {
    block_two_j_.push_back(two_j);
    multiplicity_.push_back(irrep_multiplicity(n_, two_j));
  }
  Eigen::Index rows = 0;
  for (int two_j : block_two_j_) {
    block_offset_.push_back(rows);
    rows += static_cast<Eigen::Index>(two_j + 1) * (two_j + 1);
  }
  Eigen::MatrixXd map = Eigen::MatrixXd::Zero(rows, size());

  struct Entry {
    std::uint32_t state;
    double amplitude;
  };
  for (std::size_t b = 0; b < block_two_j_.size(); ++b) {
    const int two_j = block_two_j_[b];
    const int singlets = (n_ - two_j) / 2;
    // support[i] is the representative |j, m = j - i> expanded in product states.
    std::vector<std::vector<Entry>> support(static_cast<std::size_t>(two_j + 1));
    for (std::uint32_t pattern = 0; pattern < (std::uint32_t{1} << singlets); ++pattern) {
      std::uint32_t high = 0;
      double sign = 1.0;
      for (int q = 0; q < singlets; ++q) {
        // Pair (2q, 2q+1): (up, down) with +1/sqrt2 or (down, up) with -1/sqrt2.
        const int down_site = ((pattern >> q) & 1u) ? 2 * q : 2 * q + 1;
        high |= std::uint32_t{1} << (n_ - 1 - down_site);
        if ((pattern >> q) & 1u) sign = -sign;
      }
      const double singlet_amp = sign * std::pow(0.5, 0.5 * singlets);
      for (std::uint32_t low = 0; low < (std::uint32_t{1} << two_j); ++low) {
        const int i = std::popcount(low);
        support[static_cast<std::size_t>(i)].push_back(
            {high | low, singlet_amp / std::sqrt(binomial(two_j, i))});
      }
    }
    const Eigen::Index dim = two_j + 1;
    for (Eigen::Index col = 0; col < dim; ++col) {
      for (Eigen::Index row = 0; row < dim; ++row) {
        const Eigen::Index out = block_offset_[b] + row + col * dim;
        for (const auto& ea : support[static_cast<std::size_t>(row)]) {
          for (const auto& eb : support[static_cast<std::size_t>(col)]) {
            map(out, orbit_of(ea.state, eb.state)) += ea.amplitude * eb.amplitude;
          }
        }
      }
    }
  }
  block_map_ = std::move(map);
}

std::vector<PermutationBasis::SectorBlock> PermutationBasis::to_blocks(const Vec& x) const {
  const Vec stacked = block_map_ * x;
  std::vector<SectorBlock> blocks;
  for (std::size_t b = 0; b < block_two_j_.size(); ++b) {
    const Eigen::Index dim = block_two_j_[b] + 1;
    blocks.push_back({block_two_j_[b], multiplicity_[b],
                      Eigen::Map<const Mat>(stacked.data() + block_offset_[b], dim, dim)});
  }
  return blocks;
}

cd PermutationBasis::trace(const Vec& x) const {
  cd sum = 0.0;
  for (Eigen::Index o = 0; o < size(); ++o) {
    const auto& c = counts(o);
    if (c.ud == 0 && c.du == 0) sum += orbit_size(o) * x(o);
  }
  return sum;
}

void PermutationBasis::hermitize(Eigen::Ref<Vec> x) const {
  for (Eigen::Index o = 0; o < size(); ++o) {
    const Eigen::Index a = adjoint_orbit(o);
    if (a < o) continue;
    if (a == o) {
      x(o) = x(o).real();
    } else {
      const cd mean = 0.5 * (x(o) + std::conj(x(a)));
      x(o) = mean;
      x(a) = std::conj(mean);
    }
  }
}

}  // namespace collspin
