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

#include "collspin/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace collspin {

namespace {

// Butcher tableau of Dormand & Prince (1980), FSAL form.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension (Hairer, Norsett & Wanner, dopri5 dense output).
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double scaled_norm(const Vec& v, const Vec& y0, const Vec& y1, const IntegratorOptions& o) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double sc = o.atol + o.rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    sum += std::norm(v(i)) / (sc * sc);
  }
  return std::sqrt(sum / static_cast<double>(std::max<Eigen::Index>(v.size(), 1)));
}

[[noreturn]] void fail(const std::string& what, double t, double h, const IntegrationStats& stats) {
  std::ostringstream msg;
  msg << "integrator failure: " << what << " (t = " << t << ", h = " << h << ", accepted = " << stats.accepted
      << ", rejected = " << stats.rejected << ")";
  throw NumericalError(msg.str());
}

}  // namespace

IntegrationStats integrate_dopri5(const OdeRhs& rhs, Vec y, std::span<const double> times, const OdeObserver& observer,
                                  const IntegratorOptions& options, const StepHook& hook) {
  IntegrationStats stats;
  if (times.empty()) return stats;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InvalidArgument("output times must be strictly increasing");
  }
  if (hook) hook(y);
  observer(0, times.front(), y);
  if (times.size() == 1) return stats;

  const Eigen::Index n = y.size();
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
  Vec r2(n), r3(n), r4(n), r5(n), yout(n);

  double t = times.front();
  const double t_end = times.back();
  rhs(t, y, k1);
  ++stats.rhs_evaluations;

  // Initial step guess.
  double h;
  {
    const double d0 = scaled_norm(y, y, y, options);
    const double d1n = scaled_norm(k1, y, y, options);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, t_end - t);
    ytmp = y + h0 * k1;
    rhs(t + h0, ytmp, k2);
    ++stats.rhs_evaluations;
    const double d2 = scaled_norm(k2 - k1, y, y, options) / h0;
    const double dmax = std::max(d1n, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    h = std::min(100 * h0, h1);
  }
  if (options.max_step > 0) h = std::min(h, options.max_step);

  std::size_t next_out = 1;
  bool last_rejected = false;
  while (next_out < times.size()) {
    if (stats.accepted + stats.rejected >= options.max_steps) fail("step budget exhausted", t, h, stats);
    if (h < 1e-14 * std::max(1.0, std::abs(t))) fail("step size underflow", t, h, stats);
    if (t + h > t_end) h = t_end - t;

    ytmp = y + h * (a21 * k1);
    rhs(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, ytmp, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    rhs(t + h, ynew, k7);
    stats.rhs_evaluations += 6;

    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err_norm = scaled_norm(err, y, ynew, options);

    if (!std::isfinite(err_norm)) {
      ++stats.rejected;
      h *= 0.1;
      last_rejected = true;
      continue;
    }

    if (err_norm > 1.0) {
      ++stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
      last_rejected = true;
      continue;
    }

    // Accepted: build the continuous extension before touching y.
    r2 = ynew - y;
    r3 = h * k1 - r2;
    r4 = r2 - h * k7 - r3;
    r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

    const double t_new = (t + h >= t_end) ? t_end : t + h;
    if (hook) hook(ynew);
    if (!ynew.allFinite()) fail("non-finite state", t, h, stats);

    while (next_out < times.size() && times[next_out] <= t_new * (1.0 + 1e-14) + 1e-300) {
      const double tout = times[next_out];
      if (std::abs(tout - t_new) <= 1e-13 * std::max(1.0, std::abs(t_new))) {
        observer(next_out, tout, ynew);
      } else {
        const double theta = (tout - t) / h;
        const double theta1 = 1.0 - theta;
        yout = y + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
        if (hook) hook(yout);
        observer(next_out, tout, yout);
      }
      ++next_out;
    }

    ++stats.accepted;
    t = t_new;
    y.swap(ynew);
    // FSAL: the last stage is the first stage of the next step. If the hook
    // changed the state, re-evaluate.
    if (hook) {
      rhs(t, y, k1);
      ++stats.rhs_evaluations;
    } else {
      k1.swap(k7);
    }

    double factor = std::min(10.0, std::max(0.2, 0.9 * std::pow(std::max(err_norm, 1e-10), -0.2)));
    if (last_rejected) factor = std::min(factor, 1.0);
    h *= factor;
    if (options.max_step > 0) h = std::min(h, options.max_step);
    last_rejected = false;
  }
  return stats;
}

}  // namespace collspin
