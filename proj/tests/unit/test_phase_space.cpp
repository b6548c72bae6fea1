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

#include <doctest.h>

#include <cmath>

#include "collspin/liouville.hpp"
#include "collspin/phase_space.hpp"
#include "collspin/prep.hpp"
#include "helpers.hpp"

using namespace collspin;
using collspin::testing::random_vector;

TEST_CASE("Clenshaw-Curtis weights integrate sin-weighted polynomials in cos") {
  const auto w = clenshaw_curtis_weights(101);
  for (int k = 0; k <= 20; ++k) {
    double sum = 0.0;
    for (int i = 0; i < 101; ++i) sum += w[static_cast<std::size_t>(i)] * std::pow(std::cos(i * M_PI / 100), k);
    const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
    CHECK(std::abs(sum - exact) < 1e-13);
  }
}

TEST_CASE("Husimi of a polarized state") {
  const auto g = husimi(dicke_state(HalfInt::from_twice(6), HalfInt::from_twice(6)));
  CHECK(std::abs(g.values(0, 0) - 1.0) < 1e-14);
  CHECK(g.values.maxCoeff() <= 1.0 + 1e-14);
  CHECK(g.thetas.size() == 101);
  CHECK(g.phis.size() == 201);
  CHECK(g.phis.back() < 2 * M_PI);
}

TEST_CASE("Husimi of GHZ_z: two lobes of height 1/2 and N equatorial fringes") {
  for (int n : {4, 10, 50}) {
    const auto g = husimi(ghz_axis(n, Axis::z));
    CHECK(std::abs(g.values(0, 0) - 0.5) < 1e-12);
    CHECK(std::abs(g.values(100, 0) - 0.5) < 1e-12);
    CHECK(count_phi_maxima(g, M_PI / 2) == n);
    // Closed form on the equator: 2^-N |1 + e^{i N phi}|^2 / 2 = 2^-N (1 + cos N phi).
    for (std::size_t k = 0; k < g.phis.size(); k += 17) {
      const double expect = std::pow(2.0, -n) * (1.0 + std::cos(n * g.phis[k]));
      CHECK(std::abs(g.values(50, static_cast<Eigen::Index>(k)) - expect) < 1e-12);
    }
  }
}

TEST_CASE("Husimi normalization for random states") {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const int n = 2 + static_cast<int>(seed * 2);
    SymmetricState psi{HalfInt::from_twice(n), random_vector(n + 1, seed)};
    const auto g = husimi(psi);
    CHECK(std::abs(g.normalization() - 1.0) < 1e-6);
    CHECK(g.values.minCoeff() >= 0.0);
    const auto fine = husimi(psi, {201, 401});
    CHECK(std::abs(fine.normalization() - 1.0) < 1e-6);
  }
  const Mat rho = collspin::testing::random_density(9, 5);
  CHECK(std::abs(husimi(rho).normalization() - 1.0) < 1e-6);
}

TEST_CASE("Husimi is covariant under J_z rotations") {
  const int n = 7;
  SymmetricState psi{HalfInt::from_twice(n), random_vector(n + 1, 3)};
  const SphereGridSpec spec{21, 40};
  const double shift = 2 * M_PI * 5 / 40;  // five grid steps
  SymmetricState rotated = psi;
  for (int k = 0; k <= n; ++k) rotated.amplitudes(k) *= std::exp(cd(0, -(0.5 * n - k) * shift));
  const auto a = husimi(psi, spec);
  const auto b = husimi(rotated, spec);
  for (Eigen::Index r = 0; r < 21; ++r) {
    for (Eigen::Index k = 0; k < 40; ++k) CHECK(std::abs(b.values(r, (k + 5) % 40) - a.values(r, k)) < 1e-8);
  }
}

TEST_CASE("Bloch vectors") {
  Mat up = Mat::Zero(2, 2);
  up(0, 0) = 1.0;
  auto r = bloch_vector(up);
  CHECK(r.z == 1.0);
  CHECK(r.x == 0.0);
  r = bloch_vector(Mat(0.5 * Mat::Identity(2, 2)));
  CHECK(r.norm() == 0.0);
  for (unsigned seed = 0; seed < 5; ++seed) {
    const Vec psi = random_vector(2, seed);
    CHECK(std::abs(bloch_vector(Mat(psi * psi.adjoint())).norm() - 1.0) < 1e-10);
  }
  // |+y> = (|up> + i|down>)/sqrt 2.
  Vec y(2);
  y << M_SQRT1_2, cd(0, M_SQRT1_2);
  r = bloch_vector(Mat(y * y.adjoint()));
  CHECK(std::abs(r.y - 1.0) < 1e-14);
  CHECK_THROWS_AS(bloch_vector(Mat::Identity(3, 3)), InvalidArgument);
}

TEST_CASE("density-matrix snapshots of GHZ_z at N = 5") {
  const int n = 5;
  const std::vector<NoiseChannelSpec> emission{{NoiseScope::local, NoiseKind::emission, 0.2}};
  const std::vector<NoiseChannelSpec> dephasing{{NoiseScope::local, NoiseKind::dephasing, 0.2}};
  const std::vector<double> times = {0.0, 15.0, 80.0};
  for (auto rep : {Representation::permutation, Representation::full}) {
    const auto me = make_model(rep, n, HamiltonianSpec::field_z(), emission);
    const auto se = evolve(*me, me->encode(ghz_axis(n, Axis::z)), times);
    const auto s0 = matrix_snapshot(se[0], 0.0, "t0", SnapshotBasis::dicke);
    REQUIRE(s0.values.rows() == n + 1);
    for (Eigen::Index r = 0; r <= n; ++r) {
      for (Eigen::Index c = 0; c <= n; ++c) {
        const bool corner = (r == 0 || r == n) && (c == 0 || c == n);
        CHECK(std::abs(s0.values(r, c) - (corner ? 0.5 : 0.0)) < 1e-12);
      }
    }
    CHECK(s0.labels.front() == "+5/2");
    CHECK(s0.labels.back() == "-5/2");
    const auto late = matrix_snapshot(se[2], 80.0, "late", SnapshotBasis::dicke);
    CHECK(std::abs(late.values(n, n) - 1.0) < 1e-6);

    const auto md = make_model(rep, n, HamiltonianSpec::field_z(), dephasing);
    const auto sd = evolve(*md, md->encode(ghz_axis(n, Axis::z)), times);
    const auto d = matrix_snapshot(sd[1], 15.0, "deph", SnapshotBasis::dicke);
    CHECK(std::abs(d.values(0, 0) - 0.5) < 1e-8);
    CHECK(std::abs(d.values(n, n) - 0.5) < 1e-8);
    CHECK(std::abs(std::abs(d.values(0, n)) - 0.5 * std::exp(-n * 0.2 * 15.0)) < 1e-9);
    CHECK(std::abs(matrix_snapshot(sd[2], 80.0, "deph", SnapshotBasis::dicke).values(0, n)) < 1e-9);
  }
  const auto full = make_model(Representation::full, 2, HamiltonianSpec::field_z(), emission);
  const auto native = matrix_snapshot(evolve(*full, full->encode(ghz_axis(2, Axis::z)), std::vector<double>{0.0})[0],
                                      0.0, "native");
  CHECK(native.labels == std::vector<std::string>{"uu", "ud", "du", "dd"});
}

TEST_CASE("Dicke labels") {
  CHECK(dicke_label(3) == "+3/2");
  CHECK(dicke_label(0) == "0");
  CHECK(dicke_label(-2) == "-1");
  CHECK(dicke_label(4) == "+2");
}
