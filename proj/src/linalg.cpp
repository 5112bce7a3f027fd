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

#include "cavqnd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "cavqnd/errors.hpp"

namespace cavqnd::linalg {

void spmv_serial(const SparseMatrix& a, const cplx* x, cplx* y) {
  const auto* outer = a.outerIndexPtr();
  const auto* inner = a.innerIndexPtr();
  const auto* vals = a.valuePtr();
  const Eigen::Index rows = a.rows();
  for (Eigen::Index r = 0; r < rows; ++r) {
    cplx acc{0.0, 0.0};
    for (auto k = outer[r]; k < outer[r + 1]; ++k) acc += vals[k] * x[inner[k]];
    y[r] = acc;
  }
}

void spmv_parallel(const SparseMatrix& a, const cplx* x, cplx* y) {
  const auto* outer = a.outerIndexPtr();
  const auto* inner = a.innerIndexPtr();
  const auto* vals = a.valuePtr();
  const Eigen::Index rows = a.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index r = 0; r < rows; ++r) {
    cplx acc{0.0, 0.0};
    for (auto k = outer[r]; k < outer[r + 1]; ++k) acc += vals[k] * x[inner[k]];
    y[r] = acc;
  }
}

Vector spmv(const SparseMatrix& a, const Vector& x, Execution exec) {
  if (x.size() != a.cols()) {
    throw DimensionMismatch("spmv: vector length does not match matrix");
  }
  Vector y(a.rows());
  if (exec == Execution::Parallel) {
    spmv_parallel(a, x.data(), y.data());
  } else {
    spmv_serial(a, x.data(), y.data());
  }
  return y;
}

double row_sum_bound(const SparseMatrix& a) {
  double bound = 0.0;
  for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) s += std::abs(it.value());
    bound = std::max(bound, s);
  }
  return bound;
}

namespace {

Eigen::VectorXd tridiagonal_eigenvalues(const std::vector<double>& diag,
                                        const std::vector<double>& off) {
  const auto n = static_cast<Eigen::Index>(diag.size());
  if (n == 1) return Eigen::VectorXd::Constant(1, diag[0]);
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(diag.data(), n);
  Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(off.data(), n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

LanczosResult lanczos_lowest(const LinearMap& apply, Vector start,
                             const LanczosOptions& opt) {
  const double n0 = start.norm();
  if (!(n0 > 0.0)) throw ConvergenceFailure("lanczos: zero start vector");
  Vector v = start / n0;
  Vector v_prev = Vector::Zero(v.size());
  Vector w(v.size());
  std::vector<double> alpha, beta;
  double beta_prev = 0.0;
  double last_theta = std::numeric_limits<double>::infinity();
  int stagnant = 0;

  for (int k = 0; k < opt.max_iterations; ++k) {
    apply(v, w);
    const double a = v.dot(w).real();
    w -= a * v;
    if (k > 0) w -= beta_prev * v_prev;
    // Local reorthogonalization keeps the three-term recurrence honest.
    const cplx c = v.dot(w);
    w -= c * v;
    const double b = w.norm();
    alpha.push_back(a);

    const bool check = (k + 1) % opt.check_every == 0;
    const double scale_guess =
        std::max({1.0, std::abs(a), std::abs(b), std::abs(beta_prev)});
    const bool breakdown = b < 1e-14 * scale_guess;
    if (check || breakdown || k + 1 == opt.max_iterations) {
      const Eigen::VectorXd theta = tridiagonal_eigenvalues(alpha, beta);
      const double scale =
          std::max({1.0, std::abs(theta(0)), std::abs(theta(theta.size() - 1))});
      const double lowest = theta(0);
      if (breakdown) return {lowest, 0.0, k + 1};
      if (std::abs(lowest - last_theta) <= 1e-14 * scale) {
        if (++stagnant >= 2) {
          // Residual from the Ritz vector's last component.
          const auto n = static_cast<Eigen::Index>(alpha.size());
          Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(alpha.data(), n);
          Eigen::VectorXd e =
              Eigen::Map<const Eigen::VectorXd>(beta.data(), n - 1);
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
          es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
          const double residual = b * std::abs(es.eigenvectors()(n - 1, 0));
          if (residual <= opt.residual_tolerance * scale) {
            return {es.eigenvalues()(0), residual, k + 1};
          }
        }
      } else {
        stagnant = 0;
      }
      last_theta = lowest;
    }
    beta.push_back(b);
    v_prev = v;
    v = w / b;
    beta_prev = b;
  }
  throw ConvergenceFailure("lanczos: lowest eigenvalue did not converge");
}

Vector krylov_expm_apply(const LinearMap& apply, const Vector& v, double t,
                         const KrylovOptions& opt) {
  if (t == 0.0) return v;
  const Eigen::Index n = v.size();
  const int m_max = std::max(2, std::min<int>(opt.subspace_dim, static_cast<int>(n)));
  const double total = std::abs(t);
  const double sgn = t < 0.0 ? -1.0 : 1.0;

  Vector w = v;
  double done = 0.0;
  double dt_try = total;
  Eigen::MatrixXcd basis(n, m_max + 1);
  Vector u(n);

  for (int step = 0; step < opt.max_steps && done < total; ++step) {
    const double beta0 = w.norm();
    if (beta0 == 0.0) return w;
    basis.col(0) = w / beta0;
    std::vector<double> alpha, beta;
    int m = 0;
    bool happy = false;
    double scale = 1.0;
    for (int j = 0; j < m_max; ++j) {
      apply(basis.col(j), u);
      for (int pass = 0; pass < 2; ++pass) {
        const Vector h = basis.leftCols(j + 1).adjoint() * u;
        u -= basis.leftCols(j + 1) * h;
        if (pass == 0) alpha.push_back(h(j).real());
        else alpha.back() += h(j).real();
      }
      const double b = u.norm();
      scale = std::max({scale, std::abs(alpha.back()), b});
      m = j + 1;
      beta.push_back(b);
      if (b < 1e-13 * scale) {
        happy = true;
        break;
      }
      basis.col(j + 1) = u / b;
    }

    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    if (m == 1) {
      es.compute(Eigen::MatrixXd::Constant(1, 1, d(0)));
    } else {
      Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1);
      es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
    }
    const Eigen::MatrixXd& s = es.eigenvectors();
    const Eigen::VectorXd& lam = es.eigenvalues();
    const Eigen::VectorXd s_first = s.row(0).transpose();

    double dt = std::min(dt_try, total - done);
    Vector y(m);
    for (int attempt = 0;; ++attempt) {
      Eigen::VectorXcd phase(m);
      for (int k = 0; k < m; ++k) {
        phase(k) = s_first(k) * std::exp(cplx(0.0, -sgn * dt * lam(k)));
      }
      y = s.cast<cplx>() * phase;
      const double err = happy ? 0.0 : beta.back() * std::abs(y(m - 1)) * beta0;
      if (err <= opt.tolerance * dt / total || attempt > 60) {
        if (attempt > 60) {
          throw ConvergenceFailure("krylov: step size underflow");
        }
        break;
      }
      dt *= 0.5;
    }
    w = beta0 * (basis.leftCols(m) * y);
    done += dt;
    dt_try = happy ? total : 2.0 * dt;
  }
  if (done < total) throw ConvergenceFailure("krylov: too many steps");
  return w;
}

}  // namespace cavqnd::linalg
