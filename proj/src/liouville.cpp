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

#include "collspin/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <unsupported/Eigen/MatrixFunctions>

namespace collspin {

std::string to_string(NoiseScope scope) { return scope == NoiseScope::local ? "local" : "collective"; }

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::emission: return "emission";
    case NoiseKind::pumping: return "pumping";
    case NoiseKind::dephasing: return "dephasing";
  }
  return "?";
}

NoiseScope parse_noise_scope(std::string_view text) {
  if (text == "local") return NoiseScope::local;
  if (text == "collective") return NoiseScope::collective;
  throw InvalidArgument("unknown noise scope '" + std::string(text) + "' (expected local|collective)");
}

NoiseKind parse_noise_kind(std::string_view text) {
  if (text == "emission") return NoiseKind::emission;
  if (text == "pumping") return NoiseKind::pumping;
  if (text == "dephasing") return NoiseKind::dephasing;
  throw InvalidArgument("unknown noise kind '" + std::string(text) + "' (expected emission|pumping|dephasing)");
}

std::string NoiseChannelSpec::tag() const { return to_string(scope) + "_" + to_string(kind); }

namespace {

constexpr std::pair<OperatorTag, std::string_view> kOperatorNames[] = {
    {OperatorTag::jx, "jx"},
    {OperatorTag::jy, "jy"},
    {OperatorTag::jz, "jz"},
    {OperatorTag::jx2, "jx2"},
    {OperatorTag::jy2, "jy2"},
    {OperatorTag::jz2, "jz2"},
    {OperatorTag::jx2_minus_jy2, "jx2-jy2"},
    {OperatorTag::jx2_plus_jz2, "jx2+jz2"},
    {OperatorTag::sx, "sx"},
    {OperatorTag::sy, "sy"},
    {OperatorTag::sz, "sz"},
};

}  // namespace

std::string to_string(OperatorTag tag) {
  for (const auto& [t, name] : kOperatorNames) {
    if (t == tag) return std::string(name);
  }
  return "?";
}

OperatorTag parse_operator_tag(std::string_view text) {
  for (const auto& [t, name] : kOperatorNames) {
    if (name == text) return t;
  }
  std::string known;
  for (const auto& entry : kOperatorNames) known += (known.empty() ? "" : ", ") + std::string(entry.second);
  throw InvalidArgument("unknown operator '" + std::string(text) + "' (known: " + known + ")");
}

void HamiltonianSpec::validate() const {
  std::set<std::string> seen;
  for (const auto& p : parameters) {
    if (p.name.empty()) throw InvalidArgument("parameter name must not be empty");
    if (!seen.insert(p.name).second) throw InvalidArgument("duplicate parameter name '" + p.name + "'");
    if (!std::isfinite(p.nominal)) throw InvalidArgument("parameter '" + p.name + "' has a non-finite nominal value");
  }
  for (const auto& t : static_terms) {
    if (!std::isfinite(t.coefficient)) throw InvalidArgument("non-finite Hamiltonian coefficient");
  }
}

HamiltonianSpec HamiltonianSpec::field_z(double nominal) {
  HamiltonianSpec h;
  h.parameters.push_back({"phi", OperatorTag::jz, nominal});
  return h;
}

HamiltonianSpec HamiltonianSpec::field_xyz(const std::array<double, 3>& nominal) {
  HamiltonianSpec h;
  h.parameters.push_back({"phi_x", OperatorTag::jx, nominal[0]});
  h.parameters.push_back({"phi_y", OperatorTag::jy, nominal[1]});
  h.parameters.push_back({"phi_z", OperatorTag::jz, nominal[2]});
  return h;
}

std::string to_string(Representation rep) {
  switch (rep) {
    case Representation::symmetric: return "symmetric";
    case Representation::full: return "full";
    case Representation::permutation: return "permutation";
  }
  return "?";
}

Representation parse_representation(std::string_view text) {
  if (text == "symmetric") return Representation::symmetric;
  if (text == "full") return Representation::full;
  if (text == "permutation") return Representation::permutation;
  throw InvalidArgument("unknown representation '" + std::string(text) + "' (expected symmetric|full|permutation)");
}

Representation auto_representation(int n_spins, std::span<const NoiseChannelSpec> channels) {
  if (n_spins == 1) return Representation::symmetric;
  const bool any_local = std::any_of(channels.begin(), channels.end(),
                                     [](const NoiseChannelSpec& c) { return c.scope == NoiseScope::local; });
  return any_local ? Representation::permutation : Representation::symmetric;
}

// -----------------------------------------------------------------------------
// BlockOperator

cd BlockOperator::trace() const {
  cd sum = 0.0;
  for (const auto& b : blocks) sum += b.multiplicity * b.matrix.trace();
  return sum;
}

double BlockOperator::purity() const {
  double sum = 0.0;
  for (const auto& b : blocks) sum += b.multiplicity * (b.matrix * b.matrix).trace().real();
  return sum;
}

double BlockOperator::hermiticity_error() const {
  double err = 0.0;
  for (const auto& b : blocks) {
    if (b.matrix.size() > 0) err = std::max(err, (b.matrix - b.matrix.adjoint()).cwiseAbs().maxCoeff());
  }
  return err;
}

double BlockOperator::min_eigenvalue() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks) {
    if (b.matrix.size() == 0) continue;
    const Mat herm = 0.5 * (b.matrix + b.matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(herm, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  return lo;
}

const Mat& BlockOperator::matrix() const {
  if (blocks.size() != 1) throw InvalidArgument("operator is stored in " + std::to_string(blocks.size()) + " blocks");
  return blocks.front().matrix;
}

const BlockOperator& SensitivityBundle::partial(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return partials[i];
  }
  throw InvalidArgument("no partial for parameter '" + std::string(name) + "'");
}

// -----------------------------------------------------------------------------
// Operators

namespace {

void check_product_cap(int n_spins, Representation rep) {
  if (rep != Representation::symmetric && n_spins > kMaxFullDensitySpins) {
    throw CapExceeded(to_string(rep) + " representation is capped at N = " + std::to_string(kMaxFullDensitySpins) +
                      " (got N = " + std::to_string(n_spins) + ")");
  }
}

struct SpinSet {
  SpMat jx, jy, jz;
};

SpinSet spin_set(int n_spins, Representation rep) {
  if (n_spins < 1) throw InvalidArgument("need at least one spin");
  check_product_cap(n_spins, rep);
  if (rep == Representation::symmetric) {
    const auto ops = build_collective_ops(symmetric_spin(n_spins));
    return {ops.jx.sparseView(), ops.jy.sparseView(), ops.jz.sparseView()};
  }
  return {collective_full(n_spins, SiteOp::x).matrix, collective_full(n_spins, SiteOp::y).matrix,
          collective_full(n_spins, SiteOp::z).matrix};
}

SpMat ladder(int n_spins, Representation rep, bool raise) {
  if (rep == Representation::symmetric) {
    const auto ops = build_collective_ops(symmetric_spin(n_spins));
    return raise ? SpMat(ops.jplus.sparseView()) : SpMat(ops.jminus.sparseView());
  }
  return collective_full(n_spins, raise ? SiteOp::plus : SiteOp::minus).matrix;
}

SpMat polynomial(OperatorTag tag, const SpinSet& s) {
  switch (tag) {
    case OperatorTag::jx: return s.jx;
    case OperatorTag::jy: return s.jy;
    case OperatorTag::jz: return s.jz;
    case OperatorTag::jx2: return s.jx * s.jx;
    case OperatorTag::jy2: return s.jy * s.jy;
    case OperatorTag::jz2: return s.jz * s.jz;
    case OperatorTag::jx2_minus_jy2: return SpMat(s.jx * s.jx) - SpMat(s.jy * s.jy);
    case OperatorTag::jx2_plus_jz2: return SpMat(s.jx * s.jx) + SpMat(s.jz * s.jz);
    case OperatorTag::sx: return 2.0 * s.jx;
    case OperatorTag::sy: return 2.0 * s.jy;
    case OperatorTag::sz: return 2.0 * s.jz;
  }
  throw InvalidArgument("unhandled operator tag");
}

}  // namespace

SpMat collective_operator(OperatorTag tag, int n_spins, Representation rep) {
  SpMat op = polynomial(tag, spin_set(n_spins, rep));
  op.prune(cd(0.0), 1e-15);
  return op;
}

std::vector<JumpOperator> build_jump_operators(const NoiseChannelSpec& channel, int n_spins, Representation rep) {
  if (!(channel.rate >= 0.0) || !std::isfinite(channel.rate)) {
    throw InvalidArgument("channel " + channel.tag() + " needs a finite rate >= 0");
  }
  if (n_spins < 1) throw InvalidArgument("need at least one spin");
  check_product_cap(n_spins, rep);
  std::vector<JumpOperator> jumps;

  const bool single = n_spins == 1;
  if (channel.scope == NoiseScope::collective || (single && rep == Representation::symmetric)) {
    // For one spin the sector operators are the Pauli ladder operators.
    const double deph_scale = single && channel.scope == NoiseScope::local ? std::sqrt(2.0) : 1.0;
    switch (channel.kind) {
      case NoiseKind::emission: jumps.push_back({channel.rate, ladder(n_spins, rep, false)}); break;
      case NoiseKind::pumping: jumps.push_back({channel.rate, ladder(n_spins, rep, true)}); break;
      case NoiseKind::dephasing:
        jumps.push_back({channel.rate, deph_scale * collective_operator(OperatorTag::jz, n_spins, rep)});
        break;
    }
    return jumps;
  }

  if (rep == Representation::symmetric) {
    throw UnsupportedRepresentation("local channel " + channel.tag() +
                                    " breaks permutation symmetry of the j = N/2 sector; use the full or permutation "
                                    "representation");
  }
  for (int site = 0; site < n_spins; ++site) {
    switch (channel.kind) {
      case NoiseKind::emission: jumps.push_back({channel.rate, site_operator(n_spins, site, SiteOp::minus).matrix}); break;
      case NoiseKind::pumping: jumps.push_back({channel.rate, site_operator(n_spins, site, SiteOp::plus).matrix}); break;
      case NoiseKind::dephasing:
        jumps.push_back({channel.rate, site_operator(n_spins, site, SiteOp::z).matrix / std::sqrt(2.0)});
        break;
    }
  }
  return jumps;
}

Mat apply_generator(const SpMat& hamiltonian, std::span<const JumpOperator> jumps, const Mat& rho) {
  const Eigen::Index d = rho.rows();
  if (rho.cols() != d || hamiltonian.rows() != d || hamiltonian.cols() != d) {
    throw InvalidArgument("generator dimension mismatch");
  }
  Mat out = -kI * (hamiltonian * rho);
  out += kI * (rho * hamiltonian);
  for (const auto& jump : jumps) {
    if (jump.op.rows() != d || jump.op.cols() != d) throw InvalidArgument("jump operator dimension mismatch");
    const SpMat ldag = jump.op.adjoint();
    const SpMat ldag_l = ldag * jump.op;
    const Mat l_rho = jump.op * rho;
    out += jump.rate * (l_rho * ldag);
    out -= 0.5 * jump.rate * (ldag_l * rho);
    out -= 0.5 * jump.rate * (rho * ldag_l);
  }
  return out;
}

// -----------------------------------------------------------------------------
// Models

namespace {

struct Assembled {
  SpMat hamiltonian;
  std::vector<JumpOperator> jumps;
  SpMat decay;  // sum_k rate_k L_k^dag L_k
  std::vector<SpMat> parameter_ops;
  std::vector<std::string> names;
};

Assembled assemble(Representation rep, int n_spins, const HamiltonianSpec& spec,
                   std::span<const NoiseChannelSpec> channels) {
  spec.validate();
  check_product_cap(n_spins, rep);
  const SpinSet s = spin_set(n_spins, rep);
  const Eigen::Index d = s.jz.rows();

  Assembled out;
  out.hamiltonian = SpMat(d, d);
  for (const auto& term : spec.static_terms) out.hamiltonian += term.coefficient * polynomial(term.op, s);
  for (const auto& p : spec.parameters) {
    SpMat op = polynomial(p.op, s);
    out.hamiltonian += p.nominal * op;
    out.parameter_ops.push_back(std::move(op));
    out.names.push_back(p.name);
  }
  out.hamiltonian.prune(cd(0.0), 1e-15);

  out.decay = SpMat(d, d);
  for (const auto& channel : channels) {
    auto jumps = build_jump_operators(channel, n_spins, rep);
    for (auto& j : jumps) {
      if (j.rate == 0.0) continue;
      out.decay += j.rate * SpMat(j.op.adjoint() * j.op);
      out.jumps.push_back(std::move(j));
    }
  }
  out.decay.prune(cd(0.0), 1e-15);
  return out;
}

class MatrixModel final : public LindbladModel {
 public:
  MatrixModel(Representation rep, int n_spins, Assembled a)
      : LindbladModel(rep, n_spins, std::move(a.names)),
        dim_(a.hamiltonian.rows()),
        hamiltonian_(std::move(a.hamiltonian)),
        decay_(std::move(a.decay)),
        parameter_ops_(std::move(a.parameter_ops)) {
    for (auto& j : a.jumps) {
      jumps_.push_back(j.op);
      jump_adjoints_.push_back(j.op.adjoint());
      rates_.push_back(j.rate);
    }
  }

  Eigen::Index state_size() const override { return dim_ * dim_; }

  void apply(Eigen::Ref<const Vec> x, Eigen::Ref<Vec> out) const override {
    Eigen::Map<const Mat> rho(x.data(), dim_, dim_);
    Eigen::Map<Mat> o(out.data(), dim_, dim_);
    o.noalias() = -kI * (hamiltonian_ * rho);
    o.noalias() += kI * (rho * hamiltonian_);
    if (!jumps_.empty()) {
      o.noalias() -= 0.5 * (decay_ * rho);
      o.noalias() -= 0.5 * (rho * decay_);
      Mat tmp(dim_, dim_);
      for (std::size_t k = 0; k < jumps_.size(); ++k) {
        tmp.noalias() = jumps_[k] * rho;
        o.noalias() += rates_[k] * (tmp * jump_adjoints_[k]);
      }
    }
  }

  void add_parameter_term(std::size_t mu, Eigen::Ref<const Vec> x, Eigen::Ref<Vec> out) const override {
    Eigen::Map<const Mat> rho(x.data(), dim_, dim_);
    Eigen::Map<Mat> o(out.data(), dim_, dim_);
    o.noalias() += -kI * (parameter_ops_.at(mu) * rho);
    o.noalias() += kI * (rho * parameter_ops_[mu]);
  }

  Vec encode(const SymmetricState& state) const override {
    if (state.n_spins() != n_spins()) throw InvalidArgument("state is not in the N/2 sector");
    const Vec psi = representation() == Representation::symmetric ? state.amplitudes : embed_symmetric(state, n_spins());
    const Mat rho = psi * psi.adjoint();
    return Eigen::Map<const Vec>(rho.data(), rho.size());
  }

  Vec encode(const Mat& rho) const override {
    Mat m;
    if (rho.rows() == dim_ && rho.cols() == dim_) {
      m = rho;
    } else if (representation() == Representation::full && rho.rows() == n_spins() + 1 && rho.cols() == rho.rows()) {
      const Mat iso = embedding_isometry(n_spins());
      m = iso * rho * iso.adjoint();
    } else {
      throw InvalidArgument("density matrix has dimension " + std::to_string(rho.rows()) + ", expected " +
                            std::to_string(dim_));
    }
    return Eigen::Map<const Vec>(m.data(), m.size());
  }

  BlockOperator decode(const Vec& x) const override {
    BlockOperator op;
    op.representation = representation();
    op.n_spins = n_spins();
    const int two_j = representation() == Representation::symmetric ? n_spins() : -1;
    op.blocks.push_back({two_j, 1.0, Eigen::Map<const Mat>(x.data(), dim_, dim_)});
    return op;
  }

  cd trace(const Vec& x) const override { return Eigen::Map<const Mat>(x.data(), dim_, dim_).trace(); }

  void hermitize(Eigen::Ref<Vec> x) const override {
    Eigen::Map<Mat> rho(x.data(), dim_, dim_);
    const Mat herm = 0.5 * (rho + rho.adjoint());
    rho = herm;
  }

 private:
  Eigen::Index dim_;
  SpMat hamiltonian_;
  SpMat decay_;
  std::vector<SpMat> parameter_ops_;
  std::vector<SpMat> jumps_;
  std::vector<SpMat> jump_adjoints_;
  std::vector<double> rates_;
};

// Rows of a superoperator in orbit coordinates. For a representative pair
// (r, c) of each orbit, (S rho)(r, c) is expanded over the input entries
// rho(a, b), each of which equals the orbit coordinate x[orbit(a, b)].
class OrbitRowBuilder {
 public:
  explicit OrbitRowBuilder(const PermutationBasis& basis) : basis_(basis), row_(Vec::Zero(basis.size())) {}

  // coefficient * (A rho)(r, c) = coefficient * sum_a A(r, a) rho(a, c)
  void left(const RowSpMat& a, cd coefficient, std::uint32_t r, std::uint32_t c) {
    for (RowSpMat::InnerIterator it(a, r); it; ++it) add(coefficient * it.value(), it.col(), c);
  }
  // coefficient * (rho A)(r, c) for Hermitian A: A(b, c) = conj(A(c, b)).
  void right_hermitian(const RowSpMat& a, cd coefficient, std::uint32_t r, std::uint32_t c) {
    for (RowSpMat::InnerIterator it(a, c); it; ++it) add(coefficient * std::conj(it.value()), r, it.col());
  }
  // coefficient * (L rho L^dag)(r, c) = sum_{a,b} L(r, a) rho(a, b) conj(L(c, b))
  void sandwich(const RowSpMat& l, double coefficient, std::uint32_t r, std::uint32_t c) {
    for (RowSpMat::InnerIterator ia(l, r); ia; ++ia) {
      for (RowSpMat::InnerIterator ib(l, c); ib; ++ib) {
        add(coefficient * ia.value() * std::conj(ib.value()), ia.col(), ib.col());
      }
    }
  }

  void flush(Eigen::Index row_index, std::vector<Eigen::Triplet<cd>>& triplets) {
    for (Eigen::Index o : touched_) {
      if (row_(o) != cd(0.0)) triplets.emplace_back(row_index, o, row_(o));
      row_(o) = 0.0;
    }
    touched_.clear();
  }

 private:
  void add(cd value, Eigen::Index a, Eigen::Index b) {
    const Eigen::Index o = basis_.orbit_of(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
    if (row_(o) == cd(0.0)) touched_.push_back(o);
    row_(o) += value;
    if (row_(o) == cd(0.0)) row_(o) = cd(0.0, 0.0);
  }

  const PermutationBasis& basis_;
  Vec row_;
  std::vector<Eigen::Index> touched_;
};

class PermutationModel final : public LindbladModel {
 public:
  PermutationModel(int n_spins, Assembled a)
      : LindbladModel(Representation::permutation, n_spins, std::move(a.names)),
        basis_(PermutationBasis::shared(n_spins)) {
    const Eigen::Index k = basis_->size();
    const RowSpMat h = a.hamiltonian;
    const RowSpMat decay = a.decay;
    std::vector<RowSpMat> jumps;
    std::vector<double> rates;
    for (const auto& j : a.jumps) {
      jumps.emplace_back(j.op);
      rates.push_back(j.rate);
    }

    OrbitRowBuilder builder(*basis_);
    std::vector<Eigen::Triplet<cd>> triplets;
    for (Eigen::Index o = 0; o < k; ++o) {
      const auto [r, c] = basis_->representative(o);
      builder.left(h, -kI, r, c);
      builder.right_hermitian(h, kI, r, c);
      builder.left(decay, -0.5, r, c);
      builder.right_hermitian(decay, -0.5, r, c);
      for (std::size_t j = 0; j < jumps.size(); ++j) builder.sandwich(jumps[j], rates[j], r, c);
      builder.flush(o, triplets);
    }
    generator_ = RowSpMat(k, k);
    generator_.setFromTriplets(triplets.begin(), triplets.end());

    for (const auto& op : a.parameter_ops) {
      const RowSpMat p = op;
      triplets.clear();
      for (Eigen::Index o = 0; o < k; ++o) {
        const auto [r, c] = basis_->representative(o);
        builder.left(p, -kI, r, c);
        builder.right_hermitian(p, kI, r, c);
        builder.flush(o, triplets);
      }
      RowSpMat commutator(k, k);
      commutator.setFromTriplets(triplets.begin(), triplets.end());
      commutators_.push_back(std::move(commutator));
    }
  }

  Eigen::Index state_size() const override { return basis_->size(); }

  void apply(Eigen::Ref<const Vec> x, Eigen::Ref<Vec> out) const override { out.noalias() = generator_ * x; }

  void add_parameter_term(std::size_t mu, Eigen::Ref<const Vec> x, Eigen::Ref<Vec> out) const override {
    out.noalias() += commutators_.at(mu) * x;
  }

  Vec encode(const SymmetricState& state) const override { return basis_->encode(state); }
  Vec encode(const Mat& rho) const override { return basis_->encode(rho); }

  BlockOperator decode(const Vec& x) const override {
    BlockOperator op;
    op.representation = Representation::permutation;
    op.n_spins = n_spins();
    for (auto& b : basis_->to_blocks(x)) op.blocks.push_back({b.two_j, b.multiplicity, std::move(b.matrix)});
    return op;
  }

  cd trace(const Vec& x) const override { return basis_->trace(x); }
  void hermitize(Eigen::Ref<Vec> x) const override { basis_->hermitize(x); }

 private:
  std::shared_ptr<const PermutationBasis> basis_;
  RowSpMat generator_;
  std::vector<RowSpMat> commutators_;
};

void check_grid(std::span<const double> times) {
  if (times.empty() || times.front() != 0.0) throw InvalidArgument("time grid must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InvalidArgument("time grid must be strictly increasing");
  }
}

}  // namespace

std::unique_ptr<LindbladModel> make_model(Representation rep, int n_spins, const HamiltonianSpec& hamiltonian,
                                          std::span<const NoiseChannelSpec> channels) {
  Assembled a = assemble(rep, n_spins, hamiltonian, channels);
  if (rep == Representation::permutation) return std::make_unique<PermutationModel>(n_spins, std::move(a));
  return std::make_unique<MatrixModel>(rep, n_spins, std::move(a));
}

std::vector<DensityMatrix> evolve(const LindbladModel& model, const Vec& rho0, std::span<const double> times,
                                  const IntegratorOptions& options) {
  check_grid(times);
  if (rho0.size() != model.state_size()) throw InvalidArgument("initial state has the wrong size");
  std::vector<DensityMatrix> out(times.size());
  integrate_dopri5([&](double, const Vec& y, Vec& dy) { model.apply(y, dy); }, rho0, times,
                   [&](std::size_t i, double, const Vec& y) { out[i] = model.decode(y); }, options,
                   [&](Vec& y) { model.hermitize(y); });
  return out;
}

std::vector<SensitivityBundle> evolve_with_sensitivities(const LindbladModel& model, const Vec& rho0,
                                                         std::span<const double> times,
                                                         const IntegratorOptions& options) {
  check_grid(times);
  const Eigen::Index s = model.state_size();
  if (rho0.size() != s) throw InvalidArgument("initial state has the wrong size");
  const std::size_t p = model.parameter_count();
  const Eigen::Index total = s * static_cast<Eigen::Index>(p + 1);
  Vec y0 = Vec::Zero(total);
  y0.head(s) = rho0;

  auto rhs = [&](double, const Vec& y, Vec& dy) {
    for (std::size_t mu = 0; mu <= p; ++mu) {
      const auto off = static_cast<Eigen::Index>(mu) * s;
      model.apply(y.segment(off, s), dy.segment(off, s));
      if (mu > 0) model.add_parameter_term(mu - 1, y.head(s), dy.segment(off, s));
    }
  };
  auto hook = [&](Vec& y) {
    for (std::size_t mu = 0; mu <= p; ++mu) model.hermitize(y.segment(static_cast<Eigen::Index>(mu) * s, s));
  };
  std::vector<SensitivityBundle> out(times.size());
  integrate_dopri5(
      rhs, y0, times,
      [&](std::size_t i, double t, const Vec& y) {
        auto& bundle = out[i];
        bundle.time = t;
        bundle.state = model.decode(y.head(s));
        bundle.names = model.parameter_names();
        bundle.partials.clear();
        for (std::size_t mu = 0; mu < p; ++mu) {
          bundle.partials.push_back(model.decode(y.segment(static_cast<Eigen::Index>(mu + 1) * s, s)));
        }
      },
      options, hook);
  return out;
}

std::vector<Mat> evolve(const Mat& rho0, const SpMat& hamiltonian, std::span<const JumpOperator> jumps,
                        std::span<const double> times, const IntegratorOptions& options) {
  check_grid(times);
  const Eigen::Index d = rho0.rows();
  if (rho0.cols() != d) throw InvalidArgument("density matrix must be square");
  std::vector<Mat> out(times.size());
  integrate_dopri5(
      [&](double, const Vec& y, Vec& dy) {
        const Mat drho = apply_generator(hamiltonian, jumps, Eigen::Map<const Mat>(y.data(), d, d));
        dy = Eigen::Map<const Vec>(drho.data(), drho.size());
      },
      Eigen::Map<const Vec>(rho0.data(), rho0.size()), times,
      [&](std::size_t i, double, const Vec& y) { out[i] = Eigen::Map<const Mat>(y.data(), d, d); }, options,
      [&](Vec& y) {
        Eigen::Map<Mat> rho(y.data(), d, d);
        const Mat herm = 0.5 * (rho + rho.adjoint());
        rho = herm;
      });
  return out;
}

Mat dense_generator(const LindbladModel& model) {
  const Eigen::Index s = model.state_size();
  if (s > kMaxDenseSuperoperator) throw CapExceeded("dense superoperator would have dimension " + std::to_string(s));
  Mat out(s, s);
  Vec unit = Vec::Zero(s);
  Vec col(s);
  for (Eigen::Index k = 0; k < s; ++k) {
    unit(k) = 1.0;
    model.apply(unit, col);
    out.col(k) = col;
    unit(k) = 0.0;
  }
  return out;
}

std::vector<Vec> propagate_exact(const LindbladModel& model, const Vec& rho0, std::span<const double> times,
                                 bool with_sensitivities) {
  const Eigen::Index s = model.state_size();
  const std::size_t p = with_sensitivities ? model.parameter_count() : 0;
  const Eigen::Index total = s * static_cast<Eigen::Index>(p + 1);
  if (total > kMaxDenseSuperoperator) {
    throw CapExceeded("augmented superoperator would have dimension " + std::to_string(total));
  }
  const Mat generator = dense_generator(model);
  Mat augmented = Mat::Zero(total, total);
  for (std::size_t mu = 0; mu <= p; ++mu) {
    const auto off = static_cast<Eigen::Index>(mu) * s;
    augmented.block(off, off, s, s) = generator;
    if (mu == 0) continue;
    Vec unit = Vec::Zero(s);
    Vec col(s);
    for (Eigen::Index k = 0; k < s; ++k) {
      unit(k) = 1.0;
      col.setZero();
      model.add_parameter_term(mu - 1, unit, col);
      augmented.block(off, 0, s, s).col(k) = col;
      unit(k) = 0.0;
    }
  }
  Vec y0 = Vec::Zero(total);
  y0.head(s) = rho0;
  std::vector<Vec> out;
  out.reserve(times.size());
  for (double t : times) {
    const Mat step = (augmented * cd(t)).exp();
    out.push_back(step * y0);
  }
  return out;
}

DensityMatrix steady_state(const LindbladModel& model) {
  const Mat generator = dense_generator(model);
  Eigen::BDCSVD<Mat> svd(generator, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double threshold = 1e-9 * std::max(1.0, sv(0));
  Eigen::Index null_dim = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) null_dim += sv(i) <= threshold ? 1 : 0;
  if (null_dim != 1) {
    throw NumericalError("steady state is not unique: generator null-space dimension is " + std::to_string(null_dim));
  }
  Vec x = svd.matrixV().col(sv.size() - 1);
  const cd tr = model.trace(x);
  if (std::abs(tr) < 1e-14) throw NumericalError("stationary vector is traceless");
  x /= tr;
  model.hermitize(x);
  Vec residual(x.size());
  model.apply(x, residual);
  if (residual.norm() >= 1e-10) {
    throw NumericalError("steady-state residual " + std::to_string(residual.norm()) + " exceeds 1e-10");
  }
  return model.decode(x);
}

double trace_distance(const Mat& a, const Mat& b) {
  const Mat diff = a - b;
  const Mat herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(herm, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace collspin
