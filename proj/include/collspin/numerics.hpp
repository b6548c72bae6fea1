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

// Small numerical helpers shared by the scan routines.

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace collspin {

struct ScalarOptimum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi], stopping
/// once the bracket is narrower than `tol`.
ScalarOptimum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi, double tol);

/// start, start + step, ... up to and including `stop` (within step * 1e-9).
/// Points are computed as start + i * step to avoid drift.
std::vector<double> uniform_grid(double start, double stop, double step);

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 means one per
/// hardware thread). The first exception thrown by any task is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Effective worker count for a request (0 means hardware concurrency).
unsigned resolve_threads(unsigned requested);

}  // namespace collspin
