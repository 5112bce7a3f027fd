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

// Numerical kernels shared by the operator algebra and the sector oracle.
//
// Every data-parallel kernel has a serial reference twin. The serial versions
// are what the tests compare against and what the benchmark uses as the
// baseline; production paths call the OpenMP versions.

#ifndef CAVQND_LINALG_HPP
#define CAVQND_LINALG_HPP

#include <complex>
#include <cstddef>
#include <functional>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace cavqnd::linalg {

using cplx = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using DenseMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Execution { Serial, Parallel };

/// y = A x, one row at a time.
void spmv_serial(const SparseMatrix& a, const cplx* x, cplx* y);

/// y = A x with rows distributed over OpenMP threads. Each output entry is
/// accumulated in the same order as the serial kernel, so results are
/// bit-identical.
void spmv_parallel(const SparseMatrix& a, const cplx* x, cplx* y);

Vector spmv(const SparseMatrix& a, const Vector& x,
            Execution exec = Execution::Parallel);

/// Applies a linear map into a preallocated output.
using LinearMap = std::function<void(const Vector& in, Vector& out)>;

struct LanczosOptions {
  int max_iterations = 3000;
  int check_every = 10;
  double residual_tolerance = 1e-9;  // relative to the spectral scale
};

struct LanczosResult {
  double eigenvalue = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Lowest eigenvalue of a Hermitian map by plain Lanczos. The basis is not
/// kept, so spurious copies of converged Ritz values can appear; the lowest
/// Ritz value is unaffected. Throws ConvergenceFailure.
LanczosResult lanczos_lowest(const LinearMap& apply, Vector start,
                             const LanczosOptions& opt = {});

struct KrylovOptions {
  int subspace_dim = 40;
  double tolerance = 1e-12;  // error budget over the whole interval
  int max_steps = 200000;
};

/// exp(-i H t) v for Hermitian H via restarted Lanczos with full
/// reorthogonalization inside each step.
Vector krylov_expm_apply(const LinearMap& apply, const Vector& v, double t,
                         const KrylovOptions& opt = {});

/// Upper bound on the spectral radius (maximum absolute row sum).
double row_sum_bound(const SparseMatrix& a);

}  // namespace cavqnd::linalg

#endif  // CAVQND_LINALG_HPP
