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

// Adaptive Dormand-Prince 5(4) integrator for complex vector ODEs.

#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "collspin/types.hpp"

namespace collspin {

struct IntegratorOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  std::size_t max_steps = 5'000'000;
  double max_step = 0.0;  // 0 means unbounded
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

using OdeRhs = std::function<void(double t, const Vec& y, Vec& dy)>;
/// Called with the solution at each requested output time.
using OdeObserver = std::function<void(std::size_t index, double t, const Vec& y)>;
/// Applied in place to every accepted state and to every interpolated output.
using StepHook = std::function<void(Vec& y)>;

/// Integrates y' = f(t, y) from times.front() through every entry of `times`
/// (strictly increasing), reporting each via `observer`. The first output is the
/// initial state. Outputs between steps come from the 4th-order continuous
/// extension of the method. Throws NumericalError when the step size collapses,
/// the state becomes non-finite, or max_steps is exhausted.
IntegrationStats integrate_dopri5(const OdeRhs& rhs, Vec y, std::span<const double> times, const OdeObserver& observer,
                                  const IntegratorOptions& options = {}, const StepHook& hook = {});

}  // namespace collspin
