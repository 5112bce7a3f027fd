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

// Truncated bosonic operator algebra.
//
// A ModeLayout is an ordered list of labelled modes. The flat basis index
// runs over the tensor product with the FIRST mode varying slowest, i.e.
// index = sum_k n_k * stride_k with stride_{last} = 1.

#ifndef CAVQND_FOCK_HPP
#define CAVQND_FOCK_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cavqnd/linalg.hpp"

namespace cavqnd {

using cplx = std::complex<double>;

struct Mode {
  std::string label;
  int dim = 2;
};

class ModeLayout {
 public:
  static constexpr std::size_t kDefaultMaxDim = std::size_t{1} << 20;

  ModeLayout() = default;
  explicit ModeLayout(std::vector<Mode> modes,
                      std::size_t max_total_dim = kDefaultMaxDim);

  const std::vector<Mode>& modes() const { return modes_; }
  std::size_t size() const { return modes_.size(); }
  std::size_t total_dim() const { return total_dim_; }

  bool contains(std::string_view label) const;
  /// Position of the mode in the layout. Throws UnknownMode.
  std::size_t position(std::string_view label) const;
  int dim(std::string_view label) const { return modes_[position(label)].dim; }
  std::size_t stride(std::size_t pos) const { return strides_[pos]; }

  std::vector<int> occupations(std::size_t flat) const;
  std::size_t flat_index(std::span<const int> occupations) const;
  int occupation(std::size_t flat, std::size_t pos) const {
    return static_cast<int>((flat / strides_[pos]) %
                            static_cast<std::size_t>(modes_[pos].dim));
  }

  friend bool operator==(const ModeLayout& a, const ModeLayout& b);

 private:
  std::vector<Mode> modes_;
  std::vector<std::size_t> strides_;
  std::size_t total_dim_ = 1;
};

std::string describe(const ModeLayout& layout);

enum class Storage { Dense, Sparse };

/// A complex square matrix on a mode layout. Storage is picked by fill ratio
/// at construction; both representations are always obtainable.
class FockOperator {
 public:
  static constexpr double kSparseFillThreshold = 0.05;

  FockOperator(ModeLayout layout, linalg::SparseMatrix m);
  FockOperator(ModeLayout layout, linalg::DenseMatrix m);

  static FockOperator identity(const ModeLayout& layout);
  static FockOperator zero(const ModeLayout& layout);
  /// Diagonal operator from per-basis-state values.
  static FockOperator diagonal(const ModeLayout& layout,
                               const Eigen::VectorXcd& values);

  const ModeLayout& layout() const { return layout_; }
  std::size_t dim() const { return layout_.total_dim(); }
  Storage storage() const;

  linalg::SparseMatrix sparse() const;
  linalg::DenseMatrix dense() const;
  cplx element(std::size_t row, std::size_t col) const;

  /// Same matrix forced into the given storage.
  FockOperator with_storage(Storage s) const;

  FockOperator adjoint() const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;

  double max_abs() const;
  /// max |M - M^dagger|.
  double hermiticity_defect() const;
  bool is_hermitian(double rel_tol = 1e-12) const;
  bool is_diagonal() const;

  /// Verifies Hermiticity to rel_tol * max|M| and records the flag. Throws
  /// NonHermitian.
  FockOperator& mark_hermitian(double rel_tol = 1e-12);
  bool hermitian_flag() const { return hermitian_; }

  FockOperator& operator+=(const FockOperator& o);
  FockOperator& operator-=(const FockOperator& o);
  FockOperator& operator*=(cplx s);

  friend FockOperator operator+(FockOperator a, const FockOperator& b) { return a += b; }
  friend FockOperator operator-(FockOperator a, const FockOperator& b) { return a -= b; }
  friend FockOperator operator*(FockOperator a, cplx s) { return a *= s; }
  friend FockOperator operator*(cplx s, FockOperator a) { return a *= s; }
  friend FockOperator operator*(double s, FockOperator a) { return a *= cplx(s, 0.0); }
  friend FockOperator operator*(const FockOperator& a, const FockOperator& b);

 private:
  void require_same_layout(const FockOperator& o, const char* op) const;
  void choose_storage();

  ModeLayout layout_;
  std::variant<linalg::SparseMatrix, linalg::DenseMatrix> matrix_;
  bool hermitian_ = false;
};

FockOperator commutator(const FockOperator& a, const FockOperator& b);

/// Annihilation operator on one mode, identity elsewhere:
/// a[n-1, n] = sqrt(n). Throws UnknownMode.
FockOperator annihilator(const ModeLayout& layout, std::string_view label);
FockOperator creator(const ModeLayout& layout, std::string_view label);
FockOperator number_op(const ModeLayout& layout, std::string_view label);

/// x = sqrt(hbar / (2 m w)) (b^dagger + b).
FockOperator position_op(const ModeLayout& layout, std::string_view label,
                         double mass = 1.0, double omega = 1.0,
                         double hbar = 1.0);
/// p = i sqrt(hbar m w / 2) (b^dagger - b).
FockOperator momentum_op(const ModeLayout& layout, std::string_view label,
                         double mass = 1.0, double omega = 1.0,
                         double hbar = 1.0);

/// Lifts an operator on a sub-layout into a larger layout, acting as the
/// identity on the extra modes. Every mode of op's layout must appear in
/// target with the same dimension.
FockOperator embed(const FockOperator& op, const ModeLayout& target);

/// Debug dump: one "row col re im" line per stored nonzero.
std::string to_triplet_text(const FockOperator& op);

class StateVector {
 public:
  static constexpr double kNormTolerance = 1e-9;

  /// Throws InvalidState unless the norm lies within kNormTolerance of one.
  StateVector(ModeLayout layout, Eigen::VectorXcd amplitudes);

  static StateVector normalized(ModeLayout layout, Eigen::VectorXcd amplitudes);
  static StateVector basis(const ModeLayout& layout,
                           std::span<const int> occupations);
  /// Tensor product of one normalized factor per mode, in layout order.
  static StateVector product(const ModeLayout& layout,
                             const std::vector<Eigen::VectorXcd>& factors);

  const ModeLayout& layout() const { return layout_; }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }

  double norm() const { return amps_.norm(); }
  cplx inner(const StateVector& other) const;  // <this|other>
  double fidelity(const StateVector& other) const;
  cplx expectation(const FockOperator& op) const;
  /// <n_k> for one mode, computed from the amplitudes directly.
  double mean_occupation(std::string_view label) const;
  /// Reduced density matrix of one mode.
  Eigen::MatrixXcd reduced_density(std::string_view label) const;

 private:
  ModeLayout layout_;
  Eigen::VectorXcd amps_;
};

/// Truncated coherent-state amplitudes, renormalized. Throws
/// TruncationTooSmall unless |alpha|^2 + 6|alpha| + 10 <= dim.
Eigen::VectorXcd coherent_amplitudes(cplx alpha, int dim);
int required_coherent_dim(cplx alpha);

/// Coherent state on one mode, vacuum on every other mode.
StateVector coherent_state(const ModeLayout& layout, std::string_view label,
                           cplx alpha);

struct EvolveOptions {
  std::size_t dense_limit = 1024;
  linalg::KrylovOptions krylov{};
  double hermitian_tolerance = 1e-12;
};

/// exp(-i H T) psi with hbar = 1. Diagonal operators are exponentiated
/// entry-wise, small ones by dense eigendecomposition, everything else by
/// Krylov propagation. Throws NonHermitian, DimensionMismatch.
StateVector evolve(const FockOperator& H, const StateVector& psi, double T,
                   const EvolveOptions& opt = {});

}  // namespace cavqnd

#endif  // CAVQND_FOCK_HPP
