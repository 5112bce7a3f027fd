// Copyright 2026 The cavqnd Authors
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

#include "cavqnd/fock.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cavqnd/errors.hpp"

namespace cavqnd {

using linalg::DenseMatrix;
using linalg::SparseMatrix;
using Triplet = Eigen::Triplet<cplx>;

// ---------------------------------------------------------------- layout

ModeLayout::ModeLayout(std::vector<Mode> modes, std::size_t max_total_dim)
    : modes_(std::move(modes)) {
  if (modes_.empty()) throw InvalidLayout("layout needs at least one mode");
  std::set<std::string> seen;
  total_dim_ = 1;
  for (const auto& m : modes_) {
    if (m.dim < 2) {
      throw InvalidLayout("mode '" + m.label + "' needs dimension >= 2");
    }
    if (!seen.insert(m.label).second) {
      throw InvalidLayout("duplicate mode label '" + m.label + "'");
    }
    total_dim_ *= static_cast<std::size_t>(m.dim);
    if (total_dim_ > max_total_dim) {
      throw InvalidLayout("layout dimension exceeds the configured maximum of " +
                          std::to_string(max_total_dim));
    }
  }
  strides_.assign(modes_.size(), 1);
  for (std::size_t k = modes_.size() - 1; k > 0; --k) {
    strides_[k - 1] = strides_[k] * static_cast<std::size_t>(modes_[k].dim);
  }
}

bool ModeLayout::contains(std::string_view label) const {
  return std::any_of(modes_.begin(), modes_.end(),
                     [&](const Mode& m) { return m.label == label; });
}

std::size_t ModeLayout::position(std::string_view label) const {
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    if (modes_[k].label == label) return k;
  }
  throw UnknownMode("no mode labelled '" + std::string(label) + "' in layout " +
                    describe(*this));
}

std::vector<int> ModeLayout::occupations(std::size_t flat) const {
  std::vector<int> occ(modes_.size());
  for (std::size_t k = 0; k < modes_.size(); ++k) occ[k] = occupation(flat, k);
  return occ;
}

std::size_t ModeLayout::flat_index(std::span<const int> occ) const {
  if (occ.size() != modes_.size()) {
    throw DimensionMismatch("occupation list length does not match layout");
  }
  std::size_t flat = 0;
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    if (occ[k] < 0 || occ[k] >= modes_[k].dim) {
      throw OutOfRange("occupation " + std::to_string(occ[k]) + " of mode '" +
                       modes_[k].label + "' outside truncation");
    }
    flat += static_cast<std::size_t>(occ[k]) * strides_[k];
  }
  return flat;
}

bool operator==(const ModeLayout& a, const ModeLayout& b) {
  if (a.modes_.size() != b.modes_.size()) return false;
  for (std::size_t k = 0; k < a.modes_.size(); ++k) {
    if (a.modes_[k].label != b.modes_[k].label ||
        a.modes_[k].dim != b.modes_[k].dim) {
      return false;
    }
  }
  return true;
}

std::string describe(const ModeLayout& layout) {
  std::ostringstream os;
  os << '[';
  for (std::size_t k = 0; k < layout.size(); ++k) {
    if (k) os << ", ";
    os << layout.modes()[k].label << ':' << layout.modes()[k].dim;
  }
  os << ']';
  return os.str();
}

// -------------------------------------------------------------- operator

namespace {

constexpr std::size_t kMaxDenseDim = 4096;

void prune_zeros(SparseMatrix& m) {
  m.prune([](Eigen::Index, Eigen::Index, const cplx& v) { return v != cplx{}; });
}

}  // namespace

FockOperator::FockOperator(ModeLayout layout, SparseMatrix m)
    : layout_(std::move(layout)), matrix_(std::move(m)) {
  const auto& s = std::get<SparseMatrix>(matrix_);
  if (static_cast<std::size_t>(s.rows()) != layout_.total_dim() ||
      static_cast<std::size_t>(s.cols()) != layout_.total_dim()) {
    throw DimensionMismatch("matrix size does not match layout " +
                            describe(layout_));
  }
  choose_storage();
}

FockOperator::FockOperator(ModeLayout layout, DenseMatrix m)
    : layout_(std::move(layout)), matrix_(std::move(m)) {
  const auto& d = std::get<DenseMatrix>(matrix_);
  if (static_cast<std::size_t>(d.rows()) != layout_.total_dim() ||
      static_cast<std::size_t>(d.cols()) != layout_.total_dim()) {
    throw DimensionMismatch("matrix size does not match layout " +
                            describe(layout_));
  }
  choose_storage();
}

void FockOperator::choose_storage() {
  const std::size_t n = layout_.total_dim();
  if (auto* s = std::get_if<SparseMatrix>(&matrix_)) {
    prune_zeros(*s);
    s->makeCompressed();
    const double fill = static_cast<double>(s->nonZeros()) /
                        (static_cast<double>(n) * static_cast<double>(n));
    if (fill > kSparseFillThreshold && n <= kMaxDenseDim) {
      DenseMatrix d = DenseMatrix(*s);
      matrix_ = std::move(d);
    }
  } else {
    const auto& d = std::get<DenseMatrix>(matrix_);
    const auto nnz = static_cast<double>((d.array() != cplx{}).count());
    const double fill =
        nnz / (static_cast<double>(n) * static_cast<double>(n));
    if (fill <= kSparseFillThreshold || n > kMaxDenseDim) {
      SparseMatrix s = d.sparseView();
      prune_zeros(s);
      s.makeCompressed();
      matrix_ = std::move(s);
    }
  }
}

FockOperator FockOperator::identity(const ModeLayout& layout) {
  SparseMatrix m(static_cast<Eigen::Index>(layout.total_dim()),
                 static_cast<Eigen::Index>(layout.total_dim()));
  m.setIdentity();
  return FockOperator(layout, std::move(m));
}

FockOperator FockOperator::zero(const ModeLayout& layout) {
  SparseMatrix m(static_cast<Eigen::Index>(layout.total_dim()),
                 static_cast<Eigen::Index>(layout.total_dim()));
  return FockOperator(layout, std::move(m));
}

FockOperator FockOperator::diagonal(const ModeLayout& layout,
                                    const Eigen::VectorXcd& values) {
  if (static_cast<std::size_t>(values.size()) != layout.total_dim()) {
    throw DimensionMismatch("diagonal length does not match layout");
  }
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) != cplx{}) t.emplace_back(i, i, values(i));
  }
  SparseMatrix m(values.size(), values.size());
  m.setFromTriplets(t.begin(), t.end());
  return FockOperator(layout, std::move(m));
}

Storage FockOperator::storage() const {
  return std::holds_alternative<SparseMatrix>(matrix_) ? Storage::Sparse
                                                       : Storage::Dense;
}

SparseMatrix FockOperator::sparse() const {
  if (const auto* s = std::get_if<SparseMatrix>(&matrix_)) return *s;
  SparseMatrix s = std::get<DenseMatrix>(matrix_).sparseView();
  prune_zeros(s);
  s.makeCompressed();
  return s;
}

DenseMatrix FockOperator::dense() const {
  if (const auto* d = std::get_if<DenseMatrix>(&matrix_)) return *d;
  return DenseMatrix(std::get<SparseMatrix>(matrix_));
}

cplx FockOperator::element(std::size_t row, std::size_t col) const {
  const auto r = static_cast<Eigen::Index>(row);
  const auto c = static_cast<Eigen::Index>(col);
  if (const auto* d = std::get_if<DenseMatrix>(&matrix_)) return (*d)(r, c);
  return std::get<SparseMatrix>(matrix_).coeff(r, c);
}

FockOperator FockOperator::with_storage(Storage s) const {
  FockOperator out = *this;
  if (s == Storage::Dense) {
    out.matrix_ = dense();
  } else {
    out.matrix_ = sparse();
  }
  return out;
}

FockOperator FockOperator::adjoint() const {
  if (const auto* d = std::get_if<DenseMatrix>(&matrix_)) {
    return FockOperator(layout_, DenseMatrix(d->adjoint()));
  }
  SparseMatrix a = std::get<SparseMatrix>(matrix_).adjoint();
  return FockOperator(layout_, std::move(a));
}

Eigen::VectorXcd FockOperator::apply(const Eigen::VectorXcd& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) {
    throw DimensionMismatch("state length does not match operator layout");
  }
  if (const auto* d = std::get_if<DenseMatrix>(&matrix_)) return (*d) * x;
  return linalg::spmv(std::get<SparseMatrix>(matrix_), x);
}

double FockOperator::max_abs() const {
  if (const auto* d = std::get_if<DenseMatrix>(&matrix_)) {
    return d->size() ? d->cwiseAbs().maxCoeff() : 0.0;
  }
  const auto& s = std::get<SparseMatrix>(matrix_);
  double m = 0.0;
  for (Eigen::Index k = 0; k < s.nonZeros(); ++k) {
    m = std::max(m, std::abs(s.valuePtr()[k]));
  }
  return m;
}

double FockOperator::hermiticity_defect() const {
  if (const auto* d = std::get_if<DenseMatrix>(&matrix_)) {
    return (*d - d->adjoint()).cwiseAbs().maxCoeff();
  }
  const auto& s = std::get<SparseMatrix>(matrix_);
  SparseMatrix adj = s.adjoint();
  SparseMatrix diff = s - adj;
  double m = 0.0;
  for (Eigen::Index k = 0; k < diff.nonZeros(); ++k) {
    m = std::max(m, std::abs(diff.valuePtr()[k]));
  }
  return m;
}

bool FockOperator::is_hermitian(double rel_tol) const {
  return hermiticity_defect() <= rel_tol * std::max(max_abs(), 1e-300);
}

bool FockOperator::is_diagonal() const {
  if (const auto* d = std::get_if<DenseMatrix>(&matrix_)) {
    DenseMatrix off = *d;
    off.diagonal().setZero();
    return (off.array() == cplx{}).all();
  }
  const auto& s = std::get<SparseMatrix>(matrix_);
  for (Eigen::Index r = 0; r < s.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(s, r); it; ++it) {
      if (it.col() != r && it.value() != cplx{}) return false;
    }
  }
  return true;
}

FockOperator& FockOperator::mark_hermitian(double rel_tol) {
  const double defect = hermiticity_defect();
  const double scale = max_abs();
  if (defect > rel_tol * std::max(scale, 1e-300)) {
    std::ostringstream os;
    os << "operator is not Hermitian: max|M - M^dagger| = " << defect
       << " vs max|M| = " << scale;
    throw NonHermitian(os.str());
  }
  hermitian_ = true;
  return *this;
}

void FockOperator::require_same_layout(const FockOperator& o,
                                       const char* op) const {
  if (!(layout_ == o.layout_)) {
    throw DimensionMismatch(std::string(op) + ": layouts differ, " +
                            describe(layout_) + " vs " + describe(o.layout_));
  }
}

FockOperator& FockOperator::operator+=(const FockOperator& o) {
  require_same_layout(o, "operator+");
  if (storage() == Storage::Dense && o.storage() == Storage::Dense) {
    std::get<DenseMatrix>(matrix_) += std::get<DenseMatrix>(o.matrix_);
  } else {
    SparseMatrix s = sparse();
    s += o.sparse();
    matrix_ = std::move(s);
  }
  hermitian_ = false;
  choose_storage();
  return *this;
}

FockOperator& FockOperator::operator-=(const FockOperator& o) {
  require_same_layout(o, "operator-");
  if (storage() == Storage::Dense && o.storage() == Storage::Dense) {
    std::get<DenseMatrix>(matrix_) -= std::get<DenseMatrix>(o.matrix_);
  } else {
    SparseMatrix s = sparse();
    s -= o.sparse();
    matrix_ = std::move(s);
  }
  hermitian_ = false;
  choose_storage();
  return *this;
}

FockOperator& FockOperator::operator*=(cplx s) {
  std::visit([s](auto& m) { m *= s; }, matrix_);
  hermitian_ = hermitian_ && s.imag() == 0.0;
  choose_storage();
  return *this;
}

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  a.require_same_layout(b, "operator*");
  if (a.storage() == Storage::Dense || b.storage() == Storage::Dense) {
    return FockOperator(a.layout_, DenseMatrix(a.dense() * b.dense()));
  }
  SparseMatrix p = (std::get<SparseMatrix>(a.matrix_) *
                    std::get<SparseMatrix>(b.matrix_))
                       .pruned(cplx{});
  return FockOperator(a.layout_, std::move(p));
}

FockOperator commutator(const FockOperator& a, const FockOperator& b) {
  return a * b - b * a;
}

// ---------------------------------------------------------- constructors

FockOperator annihilator(const ModeLayout& layout, std::string_view label) {
  const std::size_t pos = layout.position(label);
  const std::size_t stride = layout.stride(pos);
  const std::size_t n = layout.total_dim();
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int occ = layout.occupation(i, pos);
    if (occ > 0) {
      t.emplace_back(static_cast<Eigen::Index>(i - stride),
                     static_cast<Eigen::Index>(i),
                     cplx(std::sqrt(static_cast<double>(occ)), 0.0));
    }
  }
  SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setFromTriplets(t.begin(), t.end());
  return FockOperator(layout, std::move(m));
}

FockOperator creator(const ModeLayout& layout, std::string_view label) {
  return annihilator(layout, label).adjoint();
}

FockOperator number_op(const ModeLayout& layout, std::string_view label) {
  const std::size_t pos = layout.position(label);
  Eigen::VectorXcd d(static_cast<Eigen::Index>(layout.total_dim()));
  for (std::size_t i = 0; i < layout.total_dim(); ++i) {
    d(static_cast<Eigen::Index>(i)) = layout.occupation(i, pos);
  }
  return FockOperator::diagonal(layout, d);
}

FockOperator position_op(const ModeLayout& layout, std::string_view label,
                         double mass, double omega, double hbar) {
  if (!(mass > 0.0) || !(omega > 0.0)) {
    throw OutOfRange("position_op: mass and omega must be positive");
  }
  const FockOperator b = annihilator(layout, label);
  return std::sqrt(hbar / (2.0 * mass * omega)) * (b.adjoint() + b);
}

FockOperator momentum_op(const ModeLayout& layout, std::string_view label,
                         double mass, double omega, double hbar) {
  if (!(mass > 0.0) || !(omega > 0.0)) {
    throw OutOfRange("momentum_op: mass and omega must be positive");
  }
  const FockOperator b = annihilator(layout, label);
  return cplx(0.0, std::sqrt(hbar * mass * omega / 2.0)) * (b.adjoint() - b);
}

FockOperator embed(const FockOperator& op, const ModeLayout& target) {
  const ModeLayout& src = op.layout();
  if (src == target) return op;
  std::vector<std::size_t> target_pos(src.size());
  std::vector<bool> covered(target.size(), false);
  for (std::size_t k = 0; k < src.size(); ++k) {
    const auto& m = src.modes()[k];
    if (!target.contains(m.label)) {
      throw MissingMode("embed: target layout lacks mode '" + m.label + "'");
    }
    target_pos[k] = target.position(m.label);
    if (target.modes()[target_pos[k]].dim != m.dim) {
      throw DimensionMismatch("embed: mode '" + m.label +
                              "' has different dimensions");
    }
    covered[target_pos[k]] = true;
  }
  // Offset of every source basis state inside the target basis.
  std::vector<std::size_t> src_offset(src.total_dim());
  for (std::size_t i = 0; i < src.total_dim(); ++i) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < src.size(); ++k) {
      off += static_cast<std::size_t>(src.occupation(i, k)) *
             target.stride(target_pos[k]);
    }
    src_offset[i] = off;
  }
  // Offsets of every spectator configuration.
  std::vector<std::size_t> spectator{0};
  for (std::size_t p = 0; p < target.size(); ++p) {
    if (covered[p]) continue;
    std::vector<std::size_t> next;
    next.reserve(spectator.size() * static_cast<std::size_t>(target.modes()[p].dim));
    for (std::size_t base : spectator) {
      for (int n = 0; n < target.modes()[p].dim; ++n) {
        next.push_back(base + static_cast<std::size_t>(n) * target.stride(p));
      }
    }
    spectator = std::move(next);
  }
  const SparseMatrix s = op.sparse();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(s.nonZeros()) * spectator.size());
  for (Eigen::Index r = 0; r < s.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(s, r); it; ++it) {
      const std::size_t rr = src_offset[static_cast<std::size_t>(r)];
      const std::size_t cc = src_offset[static_cast<std::size_t>(it.col())];
      for (std::size_t sp : spectator) {
        t.emplace_back(static_cast<Eigen::Index>(rr + sp),
                       static_cast<Eigen::Index>(cc + sp), it.value());
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(target.total_dim());
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return FockOperator(target, std::move(m));
}

std::string to_triplet_text(const FockOperator& op) {
  std::ostringstream os;
  os.precision(17);
  const SparseMatrix s = op.sparse();
  for (Eigen::Index r = 0; r < s.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(s, r); it; ++it) {
      os << r << ' ' << it.col() << ' ' << it.value().real() << ' '
         << it.value().imag() << '\n';
    }
  }
  return os.str();
}

// ----------------------------------------------------------------- state

StateVector::StateVector(ModeLayout layout, Eigen::VectorXcd amplitudes)
    : layout_(std::move(layout)), amps_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amps_.size()) != layout_.total_dim()) {
    throw DimensionMismatch("amplitude vector does not match layout " +
                            describe(layout_));
  }
  const double n = amps_.norm();
  if (std::abs(n - 1.0) > kNormTolerance) {
    throw InvalidState("state norm " + std::to_string(n) + " is not 1");
  }
}

StateVector StateVector::normalized(ModeLayout layout,
                                    Eigen::VectorXcd amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0)) throw InvalidState("cannot normalize the zero vector");
  amplitudes /= n;
  return StateVector(std::move(layout), std::move(amplitudes));
}

StateVector StateVector::basis(const ModeLayout& layout,
                               std::span<const int> occupations) {
  Eigen::VectorXcd v =
      Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.total_dim()));
  v(static_cast<Eigen::Index>(layout.flat_index(occupations))) = 1.0;
  return StateVector(layout, std::move(v));
}

StateVector StateVector::product(const ModeLayout& layout,
                                 const std::vector<Eigen::VectorXcd>& factors) {
  if (factors.size() != layout.size()) {
    throw DimensionMismatch("need one factor per mode");
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (factors[k].size() != layout.modes()[k].dim) {
      throw DimensionMismatch("factor for mode '" + layout.modes()[k].label +
                              "' has wrong length");
    }
    Eigen::VectorXcd next(v.size() * factors[k].size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      next.segment(i * factors[k].size(), factors[k].size()) = v(i) * factors[k];
    }
    v = std::move(next);
  }
  return StateVector(layout, std::move(v));
}

cplx StateVector::inner(const StateVector& other) const {
  if (!(layout_ == other.layout_)) {
    throw DimensionMismatch("inner product of states on different layouts");
  }
  return amps_.dot(other.amps_);
}

double StateVector::fidelity(const StateVector& other) const {
  return std::norm(inner(other));
}

cplx StateVector::expectation(const FockOperator& op) const {
  if (!(layout_ == op.layout())) {
    throw DimensionMismatch("expectation: operator and state layouts differ");
  }
  return amps_.dot(op.apply(amps_));
}

double StateVector::mean_occupation(std::string_view label) const {
  const std::size_t pos = layout_.position(label);
  double acc = 0.0;
  for (std::size_t i = 0; i < layout_.total_dim(); ++i) {
    acc += layout_.occupation(i, pos) *
           std::norm(amps_(static_cast<Eigen::Index>(i)));
  }
  return acc;
}

Eigen::MatrixXcd StateVector::reduced_density(std::string_view label) const {
  const std::size_t pos = layout_.position(label);
  const int d = layout_.modes()[pos].dim;
  const auto stride = static_cast<std::ptrdiff_t>(layout_.stride(pos));
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t i = 0; i < layout_.total_dim(); ++i) {
    const int a = layout_.occupation(i, pos);
    const cplx psi_a = amps_(static_cast<Eigen::Index>(i));
    if (psi_a == cplx{}) continue;
    for (int b = 0; b < d; ++b) {
      const auto j = static_cast<Eigen::Index>(static_cast<std::ptrdiff_t>(i) +
                                               (b - a) * stride);
      rho(a, b) += psi_a * std::conj(amps_(j));
    }
  }
  return rho;
}

int required_coherent_dim(cplx alpha) {
  const double a = std::abs(alpha);
  return static_cast<int>(std::ceil(a * a + 6.0 * a + 10.0 - 1e-12));
}

Eigen::VectorXcd coherent_amplitudes(cplx alpha, int dim) {
  const int need = required_coherent_dim(alpha);
  if (dim < need) {
    throw TruncationTooSmall("coherent state with |alpha| = " +
                             std::to_string(std::abs(alpha)) +
                             " needs Fock dimension >= " + std::to_string(need) +
                             ", got " + std::to_string(dim));
  }
  Eigen::VectorXcd c(dim);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) {
    c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  }
  return c / c.norm();
}

StateVector coherent_state(const ModeLayout& layout, std::string_view label,
                           cplx alpha) {
  const std::size_t pos = layout.position(label);
  std::vector<Eigen::VectorXcd> factors;
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const int d = layout.modes()[k].dim;
    if (k == pos) {
      factors.push_back(coherent_amplitudes(alpha, d));
    } else {
      Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(d);
      vac(0) = 1.0;
      factors.push_back(std::move(vac));
    }
  }
  return StateVector::product(layout, factors);
}

// ------------------------------------------------------------- evolution

StateVector evolve(const FockOperator& H, const StateVector& psi, double T,
                   const EvolveOptions& opt) {
  if (!(H.layout() == psi.layout())) {
    throw DimensionMismatch("evolve: Hamiltonian and state layouts differ");
  }
  if (!H.hermitian_flag() && !H.is_hermitian(opt.hermitian_tolerance)) {
    throw NonHermitian("evolve: Hamiltonian is not Hermitian");
  }
  if (T == 0.0) return psi;

  Eigen::VectorXcd out;
  if (H.is_diagonal()) {
    const linalg::SparseMatrix s = H.sparse();
    out = psi.amplitudes();
    for (Eigen::Index r = 0; r < s.outerSize(); ++r) {
      for (linalg::SparseMatrix::InnerIterator it(s, r); it; ++it) {
        out(r) *= std::exp(cplx(0.0, -T * it.value().real()));
      }
    }
  } else if (H.dim() <= opt.dense_limit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.dense());
    const Eigen::MatrixXcd& v = es.eigenvectors();
    Eigen::VectorXcd coeff = v.adjoint() * psi.amplitudes();
    for (Eigen::Index k = 0; k < coeff.size(); ++k) {
      coeff(k) *= std::exp(cplx(0.0, -T * es.eigenvalues()(k)));
    }
    out = v * coeff;
  } else {
    const linalg::SparseMatrix s = H.sparse();
    auto apply = [&s](const linalg::Vector& in, linalg::Vector& res) {
      res.resize(in.size());
      linalg::spmv_parallel(s, in.data(), res.data());
    };
    out = linalg::krylov_expm_apply(apply, psi.amplitudes(), T, opt.krylov);
  }
  const double n = out.norm();
  if (std::abs(n - 1.0) > StateVector::kNormTolerance) {
    throw ConvergenceFailure("evolve: norm drifted to " + std::to_string(n));
  }
  return StateVector(psi.layout(), std::move(out));
}

}  // namespace cavqnd
