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

// Probe-state preparation by one- and two-axis twisting.

#pragma once

#include <array>
#include <span>
#include <string_view>

#include "collspin/spin_core.hpp"

namespace collspin {

enum class TwistingKind {
  oat,        // J_x^2
  tat_minus,  // J_x^2 - J_y^2
  tat_plus,   // J_x^2 + J_z^2
};

std::string to_string(TwistingKind kind);

struct TwistingSpec {
  TwistingKind kind = TwistingKind::oat;
  double chi_t = 0.0;
};

/// Dense twisting generator in the Dicke basis of spin j.
Mat twisting_generator(HalfInt j, TwistingKind kind);

/// exp(-i chi_t J_x^2) |j, -j>, applied in the J_x eigenbasis.
SymmetricState oat_evolve(int n_spins, double chi_t);

/// exp(-i chi_t G) initial, with G chosen by `kind`.
SymmetricState tat_evolve(const SymmetricState& initial, TwistingKind kind, double chi_t);
SymmetricState twist(const SymmetricState& initial, const TwistingSpec& spec);

struct MultiGhzFit {
  double chi_t_star = 0.0;
  double fidelity_star = 0.0;
  /// Component phases (x, y, z) of the best-matching multi-GHZ target; z is the
  /// reference and always 0.
  std::array<double, 3> phases{};
};

/// Best fidelity of `state` to a multi-GHZ target over the two free component
/// phases.
MultiGhzFit multi_ghz_overlap(const SymmetricState& state);

/// Scans J_x^2 - J_y^2 twisting of GHZ_z over `chi_t_grid`, then refines the
/// best grid point by golden-section search to 1e-6.
MultiGhzFit find_multi_ghz_time(int n_spins, std::span<const double> chi_t_grid);

enum class ProbeKind { ghz, multi_ghz, coherent, dicke };

std::string to_string(ProbeKind kind);
ProbeKind parse_probe_kind(std::string_view text);

/// Initial probe state, parametrized independently of N.
struct ProbeSpec {
  ProbeKind kind = ProbeKind::ghz;
  Axis axis = Axis::z;                  // ghz
  double rel_phase = 0.0;               // ghz
  std::array<double, 3> phases{};       // multi_ghz component phases
  double theta = 0.0, phi = 0.0;        // coherent
  int two_m = 0;                        // dicke, as 2m

  /// A one-spin GHZ probe is the same two-branch superposition (|+x> for z).
  SymmetricState make(int n_spins) const;
};

/// |<a|b>|^2.
double fidelity(const SymmetricState& a, const SymmetricState& b);

}  // namespace collspin
