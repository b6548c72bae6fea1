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

#include "collspin/prep.hpp"
#include "collspin/spin_core.hpp"
#include "helpers.hpp"

using namespace collspin;
using collspin::testing::max_abs;
using collspin::testing::random_vector;

namespace {

Mat dense(const SpMat& m) { return Mat(m); }

// Independent ladder construction straight from the matrix elements.
Mat ladder_plus(int two_j) {
  const double j = 0.5 * two_j;
  Mat jp = Mat::Zero(two_j + 1, two_j + 1);
  for (int k = 1; k <= two_j; ++k) {
    const double m = j - k;  // column state m, row state m + 1
    jp(k - 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  return jp;
}

}  // namespace

TEST_CASE("HalfInt and DickeLabel validate their arguments") {
  CHECK(HalfInt::from_double(2.5).twice() == 5);
  CHECK_THROWS_AS(HalfInt::from_double(0.3), InvalidArgument);
  const auto label = DickeLabel::make(HalfInt::from_twice(4), HalfInt::from_twice(-2));
  CHECK(label.index() == 3);
  CHECK_THROWS_AS(DickeLabel::make(HalfInt::from_twice(4), HalfInt::from_twice(1)), InvalidArgument);
  CHECK_THROWS_AS(DickeLabel::make(HalfInt::from_twice(2), HalfInt::from_twice(4)), InvalidArgument);
}

TEST_CASE("angular momentum algebra holds up to j = 25") {
  for (int two_j = 1; two_j <= 50; ++two_j) {
    const auto ops = build_collective_ops(HalfInt::from_twice(two_j));
    const double j = 0.5 * two_j;
    const Mat id = Mat::Identity(two_j + 1, two_j + 1);
    CHECK(max_abs(ops.jx * ops.jy - ops.jy * ops.jx - kI * ops.jz) < 1e-12);
    CHECK(max_abs(ops.jy * ops.jz - ops.jz * ops.jy - kI * ops.jx) < 1e-12);
    CHECK(max_abs(ops.jz * ops.jx - ops.jx * ops.jz - kI * ops.jy) < 1e-12);
    CHECK(max_abs(ops.jx * ops.jx + ops.jy * ops.jy + ops.jz * ops.jz - j * (j + 1) * id) < 1e-12 * std::max(1.0, j * j));
    CHECK(max_abs(ops.jsq - j * (j + 1) * id) < 1e-12 * std::max(1.0, j * j));
    CHECK(max_abs(ops.jplus - (ops.jx + kI * ops.jy)) < 1e-12);
    CHECK(max_abs(ops.jminus - (ops.jx - kI * ops.jy)) < 1e-12);
    CHECK(max_abs(ops.jplus - ladder_plus(two_j)) < 1e-12);
    Mat off = ops.jz;
    off.diagonal().setZero();
    CHECK(max_abs(off) == 0.0);
  }
}

TEST_CASE("small-j matrix elements") {
  const auto half = build_collective_ops(HalfInt::from_twice(1));
  CHECK(std::abs(half.jz(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(half.jz(1, 1) + 0.5) < 1e-15);
  const auto one = build_collective_ops(HalfInt::from_twice(2));
  CHECK(std::abs(one.jplus(0, 1) - std::sqrt(2.0)) < 1e-14);
  const auto five = build_collective_ops(HalfInt::from_twice(10));
  for (int k = 0; k <= 10; ++k) CHECK(std::abs(five.jz(k, k).real() - (5 - k)) < 1e-14);
  CHECK_THROWS_AS(build_collective_ops(HalfInt::from_twice(0)), InvalidArgument);
}

TEST_CASE("spin coherent states") {
  const HalfInt j = HalfInt::from_twice(7);
  const auto up = spin_coherent_state(j, 0.0, 0.0);
  CHECK(std::abs(std::abs(up.amplitudes(0)) - 1.0) < 1e-14);
  const auto down = spin_coherent_state(j, M_PI, 0.0);
  CHECK(std::abs(std::abs(down.amplitudes(7)) - 1.0) < 1e-12);
  const auto plus_x = spin_coherent_state(HalfInt::from_twice(1), M_PI / 2, 0.0);
  CHECK(std::abs(plus_x.amplitudes(0) - cd(M_SQRT1_2, 0)) < 1e-14);
  CHECK(std::abs(plus_x.amplitudes(1) - cd(M_SQRT1_2, 0)) < 1e-14);
  const auto ops = build_collective_ops(j);
  for (double theta : {0.3, 1.1, 2.5}) {
    const auto s = spin_coherent_state(j, theta, 0.7);
    CHECK(std::abs(s.norm() - 1.0) < 1e-12);
    const double jz = s.amplitudes.dot(ops.jz * s.amplitudes).real();
    CHECK(std::abs(jz - j.value() * std::cos(theta)) < 1e-10);
  }
}

TEST_CASE("GHZ states along each axis") {
  const auto z = ghz_axis(4, Axis::z);
  CHECK(std::abs(z.amplitudes(0) - cd(M_SQRT1_2, 0)) < 1e-14);
  CHECK(std::abs(z.amplitudes(4) - cd(M_SQRT1_2, 0)) < 1e-14);
  CHECK(z.amplitudes.segment(1, 3).norm() < 1e-14);
  const auto ops = build_collective_ops(HalfInt::from_twice(4));
  CHECK(std::abs(z.amplitudes.dot(ops.jz * ops.jz * z.amplitudes).real() - 4.0) < 1e-12);
  CHECK(std::abs(z.amplitudes.dot(ops.jz * z.amplitudes)) < 1e-14);

  // Brute-force: extremal J_x eigenvectors from a Hermitian eigensolver.
  Eigen::SelfAdjointEigenSolver<Mat> es(ops.jx);
  Vec lo = es.eigenvectors().col(0);
  Vec hi = es.eigenvectors().col(4);
  const auto x = ghz_axis(4, Axis::x);
  // Overlap with GHZ_z is independent of the eigenvector phases only up to the
  // relative phase, so compare against the phase convention explicitly.
  auto fix = [](Vec v) {
    Eigen::Index k;
    v.cwiseAbs().maxCoeff(&k);
    return Vec(v * std::conj(v(k)) / std::abs(v(k)));
  };
  const Vec expect = (fix(hi) + fix(lo)) / std::sqrt(2.0);
  CHECK(std::abs(std::norm(expect.dot(z.amplitudes)) - fidelity(x, z)) < 1e-12);
  CHECK(std::abs(std::abs(expect.dot(x.amplitudes)) - 1.0) < 1e-12);

  const auto phased = ghz_axis(4, Axis::z, M_PI / 3);
  CHECK(std::abs(phased.amplitudes(4) - std::polar(M_SQRT1_2, M_PI / 3)) < 1e-14);
  CHECK_THROWS_AS(ghz_axis(1, Axis::z), InvalidArgument);
}

TEST_CASE("multi-GHZ normalization from the Gram matrix") {
  for (int n : {2, 3, 4, 7, 10}) {
    const auto m = multi_ghz(n);
    CHECK(std::abs(m.norm() - 1.0) < 1e-12);
    const auto gx = ghz_axis(n, Axis::x), gy = ghz_axis(n, Axis::y), gz = ghz_axis(n, Axis::z);
    const double n2 = 3.0 + 2.0 * (inner(gx, gy).real() + inner(gx, gz).real() + inner(gy, gz).real());
    CHECK(std::abs(multi_ghz_normalization(n) - std::sqrt(n2)) < 1e-12);
    const Vec sum = (gx.amplitudes + gy.amplitudes + gz.amplitudes) / std::sqrt(n2);
    CHECK((sum - m.amplitudes).norm() < 1e-12);
  }
  CHECK_THROWS_AS(multi_ghz(1), InvalidArgument);
}

TEST_CASE("embedding into the product space") {
  const double s = M_SQRT1_2;
  const Vec triplet = embed_symmetric(dicke_state(HalfInt::from_twice(2), HalfInt::from_twice(0)), 2);
  CHECK(std::abs(triplet(1) - s) < 1e-14);  // |up down>
  CHECK(std::abs(triplet(2) - s) < 1e-14);  // |down up>
  CHECK(std::abs(triplet(0)) + std::abs(triplet(3)) < 1e-14);
  const Vec top = embed_symmetric(dicke_state(HalfInt::from_twice(5), HalfInt::from_twice(5)), 5);
  CHECK(std::abs(top(0) - 1.0) < 1e-14);
  const Vec g = embed_symmetric(ghz_axis(3, Axis::z), 3);
  CHECK(std::abs(g(0) - s) < 1e-14);
  CHECK(std::abs(g(7) - s) < 1e-14);
  CHECK(std::abs(g.norm() - 1.0) < 1e-14);

  for (int n = 1; n <= 8; ++n) {
    const HalfInt j = symmetric_spin(n);
    SymmetricState a{j, random_vector(n + 1, 10 + n)}, b{j, random_vector(n + 1, 40 + n)};
    const cd full = embed_symmetric(a, n).dot(embed_symmetric(b, n));
    CHECK(std::abs(full - inner(a, b)) < 1e-12);
    const Mat iso = embedding_isometry(n);
    CHECK(max_abs(iso.adjoint() * iso - Mat::Identity(n + 1, n + 1)) < 1e-12);
    // Collective operators restrict to the sector matrices.
    const auto ops = build_collective_ops(j);
    CHECK(max_abs(iso.adjoint() * dense(collective_full(n, SiteOp::x).matrix) * iso - ops.jx) < 1e-12);
    CHECK(max_abs(iso.adjoint() * dense(collective_full(n, SiteOp::y).matrix) * iso - ops.jy) < 1e-12);
    CHECK(max_abs(iso.adjoint() * dense(collective_full(n, SiteOp::z).matrix) * iso - ops.jz) < 1e-12);
    CHECK(max_abs(iso.adjoint() * dense(collective_full(n, SiteOp::plus).matrix) * iso - ops.jplus) < 1e-12);
  }
  CHECK_THROWS_AS(embed_symmetric(ghz_axis(15, Axis::z), 15), CapExceeded);
}

TEST_CASE("site operators act on the intended Kronecker factor") {
  const Mat sx = dense(site_operator(2, 0, SiteOp::x).matrix);
  Mat expect = Mat::Zero(4, 4);
  expect(0, 2) = expect(2, 0) = expect(1, 3) = expect(3, 1) = 1.0;
  CHECK(max_abs(sx - expect) == 0.0);
  const Mat sm = dense(site_operator(1, 0, SiteOp::minus).matrix);
  CHECK(std::abs(sm(1, 0) - 1.0) == 0.0);  // |down><up|
  CHECK(std::abs(sm(0, 1)) == 0.0);
  CHECK_THROWS(site_operator(3, 3, SiteOp::z));
}

TEST_CASE("binomial coefficients") {
  CHECK(binomial(10, 5) == 252.0);
  CHECK(binomial(4, 0) == 1.0);
  CHECK(binomial(30, 15) == 155117520.0);
}
