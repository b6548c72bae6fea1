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
#include "collspin/numerics.hpp"
#include "collspin/prep.hpp"
#include "helpers.hpp"

using namespace collspin;
using collspin::testing::max_abs;
using collspin::testing::random_vector;

TEST_CASE("one-axis twisting forms GHZ_z at chi t = pi/2 for even N") {
  for (int n : {4, 6, 8, 10}) {
    const auto s = oat_evolve(n, M_PI / 2);
    CHECK(std::abs(std::norm(s.amplitudes(0)) - 0.5) < 1e-10);
    CHECK(std::abs(std::norm(s.amplitudes(n)) - 0.5) < 1e-10);
    for (int k = 1; k < n; ++k) CHECK(std::norm(s.amplitudes(k)) < 1e-10);
    double best = 0.0;
    for (int i = 0; i < 720; ++i) best = std::max(best, fidelity(s, ghz_axis(n, Axis::z, i * M_PI / 360)));
    // The relative phase of the two branches is a multiple of pi/2.
    CHECK(best >= 1.0 - 1e-10);
  }
}

TEST_CASE("N = 4 GHZ phase at chi t = pi/2 follows exp(-i pi/2 m_x^2)") {
  // Oracle: expand |j,-j> in the J_x eigenbasis from an eigensolver.
  const auto ops = build_collective_ops(HalfInt::from_twice(4));
  Eigen::SelfAdjointEigenSolver<Mat> es(ops.jx);
  Vec start = Vec::Zero(5);
  start(4) = 1.0;
  Vec phases(5);
  for (int k = 0; k < 5; ++k) phases(k) = std::exp(cd(0, -M_PI / 2 * es.eigenvalues()(k) * es.eigenvalues()(k)));
  const Vec expect = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint() * start;
  const auto s = oat_evolve(4, M_PI / 2);
  CHECK(std::abs(std::abs(expect.dot(s.amplitudes)) - 1.0) < 1e-12);
  const cd rel = s.amplitudes(4) / s.amplitudes(0);
  const double best = fidelity(s, ghz_axis(4, Axis::z, std::arg(rel)));
  CHECK(best >= 1.0 - 1e-10);
}

TEST_CASE("twisting is unitary and periodic") {
  const auto base = oat_evolve(7, 0.0);
  CHECK(std::abs(std::norm(base.amplitudes(7)) - 1.0) < 1e-14);
  for (double t : {0.2, 1.3, 2.9}) {
    for (int n : {5, 6}) {
      const auto a = oat_evolve(n, t);
      const auto b = oat_evolve(n, t + 2 * M_PI);
      CHECK(std::abs(a.norm() - 1.0) < 1e-12);
      CHECK(fidelity(a, b) > 1.0 - 1e-12);
    }
  }
  for (unsigned seed = 0; seed < 4; ++seed) {
    SymmetricState psi{HalfInt::from_twice(9), random_vector(10, seed)};
    for (auto kind : {TwistingKind::oat, TwistingKind::tat_minus, TwistingKind::tat_plus}) {
      CHECK(std::abs(tat_evolve(psi, kind, 0.77).norm() - 1.0) < 1e-12);
      CHECK(fidelity(tat_evolve(psi, kind, 0.0), psi) > 1.0 - 1e-14);
    }
  }
}

TEST_CASE("twisting generators") {
  const HalfInt j = HalfInt::from_twice(6);
  const auto ops = build_collective_ops(j);
  CHECK(max_abs(twisting_generator(j, TwistingKind::oat) - ops.jx * ops.jx) < 1e-12);
  CHECK(max_abs(twisting_generator(j, TwistingKind::tat_minus) - (ops.jx * ops.jx - ops.jy * ops.jy)) < 1e-12);
  CHECK(max_abs(twisting_generator(j, TwistingKind::tat_plus) - (ops.jx * ops.jx + ops.jz * ops.jz)) < 1e-12);
}

TEST_CASE("two-axis twisting conserves J_z parity of GHZ_z") {
  for (int n : {4, 5, 10}) {
    const auto g = ghz_axis(n, Axis::z);
    for (double t : {0.1, 0.5, 1.7}) {
      const auto s = tat_evolve(g, TwistingKind::tat_minus, t);
      cd parity = 0.0;
      cd parity0 = 0.0;
      for (int k = 0; k <= n; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;  // exp(i pi (m - j)) with m = j - k
        parity += sign * std::norm(s.amplitudes(k));
        parity0 += sign * std::norm(g.amplitudes(k));
      }
      CHECK(std::abs(parity - parity0) < 1e-12);
    }
  }
}

TEST_CASE("twisting agrees with master-equation evolution") {
  const int n = 6;
  HamiltonianSpec h;
  h.static_terms.push_back({1.0, OperatorTag::jx2});
  const auto model = make_model(Representation::symmetric, n, h, {});
  const std::vector<double> times = {0.0, 0.4, 1.1};
  const auto start = dicke_state(HalfInt::from_twice(n), HalfInt::from_twice(-n));
  IntegratorOptions tight;
  tight.rtol = 1e-11;
  tight.atol = 1e-13;
  const auto states = evolve(*model, model->encode(start), times, tight);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto psi = oat_evolve(n, times[i]);
    const double f = psi.amplitudes.dot(states[i].matrix() * psi.amplitudes).real();
    CHECK(f > 1.0 - 1e-8);
  }
}

TEST_CASE("fidelity") {
  const auto g = ghz_axis(6, Axis::z);
  CHECK(std::abs(fidelity(g, g) - 1.0) < 1e-14);
  const auto a = dicke_state(HalfInt::from_twice(6), HalfInt::from_twice(2));
  const auto b = dicke_state(HalfInt::from_twice(6), HalfInt::from_twice(0));
  CHECK(fidelity(a, b) == 0.0);
  CHECK(std::abs(fidelity(g, dicke_state(HalfInt::from_twice(6), HalfInt::from_twice(6))) - 0.5) < 1e-14);
  CHECK_THROWS_AS(fidelity(g, ghz_axis(4, Axis::z)), InvalidArgument);
}

TEST_CASE("multi-GHZ overlap at chi t = 0 follows from the Gram matrix") {
  for (int n : {3, 6, 10}) {
    const auto g = ghz_axis(n, Axis::z);
    const auto fit = multi_ghz_overlap(g);
    // Brute force over both free phases on a fine grid.
    double best = 0.0;
    for (int a = 0; a < 180; ++a) {
      for (int b = 0; b < 180; ++b) {
        best = std::max(best, fidelity(g, multi_ghz(n, {a * M_PI / 90, b * M_PI / 90, 0.0})));
      }
    }
    CHECK(fit.fidelity_star >= best - 1e-9);
    CHECK(fit.fidelity_star <= 1.0 + 1e-12);
    CHECK(std::abs(fit.fidelity_star - fidelity(g, multi_ghz(n, fit.phases))) < 1e-10);
    CHECK(fit.phases[2] == 0.0);
  }
}

TEST_CASE("multi-GHZ time search matches an exhaustive N = 2 scan") {
  const auto coarse = uniform_grid(0.0, M_PI, 1e-2);
  const auto fit = find_multi_ghz_time(2, coarse);
  double best = 0.0;
  for (double t : uniform_grid(0.0, M_PI, 1e-3)) {
    best = std::max(best, multi_ghz_overlap(tat_evolve(ghz_axis(2, Axis::z), TwistingKind::tat_minus, t)).fidelity_star);
  }
  CHECK(fit.fidelity_star >= best - 1e-6);
  CHECK(fit.fidelity_star <= 1.0 + 1e-12);
  CHECK(fit.chi_t_star >= 0.0);
  CHECK(fit.chi_t_star <= M_PI);
}

TEST_CASE("probe specs") {
  ProbeSpec p;
  const auto one = p.make(1);
  CHECK(std::abs(one.amplitudes(0) - cd(M_SQRT1_2, 0)) < 1e-14);
  CHECK(std::abs(one.amplitudes(1) - cd(M_SQRT1_2, 0)) < 1e-14);
  p.kind = ProbeKind::dicke;
  p.two_m = 0;
  CHECK(std::abs(std::abs(p.make(4).amplitudes(2)) - 1.0) < 1e-14);
  p.two_m = 1;
  CHECK_THROWS_AS(p.make(4), InvalidArgument);
  p.kind = ProbeKind::coherent;
  p.theta = M_PI / 2;
  CHECK(std::abs(p.make(5).norm() - 1.0) < 1e-12);
  p.kind = ProbeKind::multi_ghz;
  CHECK(fidelity(p.make(4), multi_ghz(4)) > 1.0 - 1e-14);
  CHECK(parse_probe_kind("multi_ghz") == ProbeKind::multi_ghz);
  CHECK_THROWS_AS(parse_probe_kind("w"), InvalidArgument);
}
