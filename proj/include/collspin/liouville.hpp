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

// Lindblad generators for collective spin ensembles and their integration,
// including forward propagation of parameter sensitivities d rho / d phi_mu.
//
// Rate convention: a channel with rate g contributes g * D[L] with
//   D[L] rho = L rho L^dag - 1/2 {L^dag L, rho}.
// The Table-style forms that carry a leading factor 2 (2 L rho L^dag - ...)
// correspond to rate 2g here. Dephasing jumps are sigma_z / sqrt(2) (local) and
// J_z (collective), so a local dephasing rate g damps single-spin coherences at
// rate g.

#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "collspin/ode.hpp"
#include "collspin/permutation.hpp"
#include "collspin/spin_core.hpp"

namespace collspin {

enum class NoiseScope { local, collective };
enum class NoiseKind { emission, pumping, dephasing };

struct NoiseChannelSpec {
  NoiseScope scope = NoiseScope::local;
  NoiseKind kind = NoiseKind::emission;
  double rate = 0.0;

  /// e.g. "local_emission".
  std::string tag() const;
};

std::string to_string(NoiseScope scope);
std::string to_string(NoiseKind kind);
NoiseScope parse_noise_scope(std::string_view text);
NoiseKind parse_noise_kind(std::string_view text);

/// Collective operator polynomials available to Hamiltonians. The s* tags are
/// sum_n sigma^(n) = 2 J (single-spin Pauli units when N = 1).
enum class OperatorTag { jx, jy, jz, jx2, jy2, jz2, jx2_minus_jy2, jx2_plus_jz2, sx, sy, sz };

std::string to_string(OperatorTag tag);
OperatorTag parse_operator_tag(std::string_view text);

struct HamiltonianTerm {
  double coefficient = 0.0;
  OperatorTag op = OperatorTag::jz;
};

/// A parameter that enters the Hamiltonian linearly as value * op.
struct EstimatedParameter {
  std::string name;
  OperatorTag op = OperatorTag::jz;
  double nominal = 0.0;
};

struct HamiltonianSpec {
  std::vector<HamiltonianTerm> static_terms;
  std::vector<EstimatedParameter> parameters;

  /// Throws InvalidArgument on duplicate or empty parameter names.
  void validate() const;

  /// phi J_z with phi at `nominal`.
  static HamiltonianSpec field_z(double nominal = 0.0);
  /// phi . J with the three components at `nominal`.
  static HamiltonianSpec field_xyz(const std::array<double, 3>& nominal);
};

enum class Representation {
  symmetric,    // j = N/2 sector, dimension N+1
  full,         // 2^N product space, dense density matrix
  permutation,  // 2^N product space restricted to permutation-invariant operators
};

std::string to_string(Representation rep);
Representation parse_representation(std::string_view text);

/// Symmetric sector when every channel is collective (or N = 1), otherwise the
/// permutation-invariant product-space representation.
Representation auto_representation(int n_spins, std::span<const NoiseChannelSpec> channels);

/// One spin-j block of a block-diagonal operator, repeated `multiplicity` times.
/// two_j = -1 labels an unresolved product-space matrix.
struct Block {
  int two_j = -1;
  double multiplicity = 1.0;
  Mat matrix;
};

struct BlockOperator {
  Representation representation = Representation::symmetric;
  int n_spins = 0;
  std::vector<Block> blocks;

  cd trace() const;
  double purity() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;
  /// The single matrix of a symmetric or full representation.
  const Mat& matrix() const;
};

/// Density matrices and their parameter derivatives share the block layout.
using DensityMatrix = BlockOperator;

struct SensitivityBundle {
  double time = 0.0;
  DensityMatrix state;
  std::vector<std::string> names;
  std::vector<BlockOperator> partials;

  const BlockOperator& partial(std::string_view name) const;
};

struct JumpOperator {
  double rate = 0.0;
  SpMat op;
};

/// Matrix of a collective operator in the sector (symmetric) or product space
/// (full, permutation).
SpMat collective_operator(OperatorTag tag, int n_spins, Representation rep);

/// Jump operators of one channel. Local channels in the symmetric sector are
/// rejected for N > 1 with UnsupportedRepresentation.
std::vector<JumpOperator> build_jump_operators(const NoiseChannelSpec& channel, int n_spins, Representation rep);

/// -i[H, rho] + sum_k rate_k D[L_k] rho.
Mat apply_generator(const SpMat& hamiltonian, std::span<const JumpOperator> jumps, const Mat& rho);

/// Time-independent Lindblad generator acting on a representation-specific
/// vectorization of the density matrix, together with the commutators
/// -i[O_mu, .] of every estimated parameter. Immutable after construction.
class LindbladModel {
 public:
  virtual ~LindbladModel() = default;

  Representation representation() const noexcept { return representation_; }
  int n_spins() const noexcept { return n_spins_; }
  const std::vector<std::string>& parameter_names() const noexcept { return parameter_names_; }
  std::size_t parameter_count() const noexcept { return parameter_names_.size(); }

  virtual Eigen::Index state_size() const = 0;
  /// out = L x.
  virtual void apply(Eigen::Ref<const Vec> x, Eigen::Ref<Vec> out) const = 0;
  /// out += -i[O_mu, x].
  virtual void add_parameter_term(std::size_t mu, Eigen::Ref<const Vec> x, Eigen::Ref<Vec> out) const = 0;

  virtual Vec encode(const SymmetricState& state) const = 0;
  /// Accepts a symmetric-sector matrix, or a product-space matrix where the
  /// representation lives in the product space.
  virtual Vec encode(const Mat& rho) const = 0;
  virtual BlockOperator decode(const Vec& x) const = 0;
  virtual cd trace(const Vec& x) const = 0;
  virtual void hermitize(Eigen::Ref<Vec> x) const = 0;

 protected:
  LindbladModel(Representation rep, int n_spins, std::vector<std::string> names)
      : representation_(rep), n_spins_(n_spins), parameter_names_(std::move(names)) {}

 private:
  Representation representation_;
  int n_spins_;
  std::vector<std::string> parameter_names_;
};

/// Builds H = sum static terms + sum nominal_mu O_mu and the channel jumps.
/// Enforces the representation caps (product space: N <= 12).
std::unique_ptr<LindbladModel> make_model(Representation rep, int n_spins, const HamiltonianSpec& hamiltonian,
                                          std::span<const NoiseChannelSpec> channels);

/// Snapshots at every grid time (strictly increasing, starting at 0).
/// Each accepted step is re-Hermitized.
std::vector<DensityMatrix> evolve(const LindbladModel& model, const Vec& rho0, std::span<const double> times,
                                  const IntegratorOptions& options = {});

/// Jointly integrates rho and d rho / d phi_mu for every model parameter.
std::vector<SensitivityBundle> evolve_with_sensitivities(const LindbladModel& model, const Vec& rho0,
                                                         std::span<const double> times,
                                                         const IntegratorOptions& options = {});

/// Matrix-level evolution in a single-matrix representation (no parameters).
std::vector<Mat> evolve(const Mat& rho0, const SpMat& hamiltonian, std::span<const JumpOperator> jumps,
                        std::span<const double> times, const IntegratorOptions& options = {});

/// Largest vectorized dimension for which dense superoperators are formed.
inline constexpr Eigen::Index kMaxDenseSuperoperator = 4096;

/// Dense matrix of the generator in the model's vectorization.
Mat dense_generator(const LindbladModel& model);

/// Exact propagation via the matrix exponential of the (sensitivity-augmented)
/// generator. Returns one stacked vector [rho; d_1 rho; ...] per time when
/// `with_sensitivities` is set, otherwise just rho.
std::vector<Vec> propagate_exact(const LindbladModel& model, const Vec& rho0, std::span<const double> times,
                                 bool with_sensitivities);

/// Unique stationary state. Throws NumericalError naming the null-space
/// dimension when it is not unique.
DensityMatrix steady_state(const LindbladModel& model);

/// Trace distance 1/2 ||a - b||_1 between two Hermitian matrices.
double trace_distance(const Mat& a, const Mat& b);

}  // namespace collspin
