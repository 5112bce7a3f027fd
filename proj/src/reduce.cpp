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

#include "cavqnd/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "cavqnd/errors.hpp"
#include "cavqnd/io.hpp"

namespace cavqnd {

namespace {

void require_stable(Variant v, const Rates& p) {
  const double w = p.omega_m;
  if (v != Variant::FullOuter && !(w > 8.0 * p.G_inner)) {
    throw StabilityViolation("sector oracle requires omega_m > 8G");
  }
  if (v != Variant::FullInner && !(w > 4.0 * p.G_outer)) {
    throw StabilityViolation("sector oracle requires omega_m > 4G0");
  }
}

// Sector blocks are real symmetric: every term is a real combination of
// ladder operators.
std::vector<double> block_spectrum(const FockOperator& h,
                                   const SectorOptions& opt) {
  if (h.dim() <= opt.dense_limit) {
    const Eigen::MatrixXcd m = h.dense();
    const double residue = m.imag().cwiseAbs().maxCoeff();
    if (residue > 1e-10) {
      throw NonHermitian("sector block has imaginary residue " +
                         std::to_string(residue));
    }
    const Eigen::MatrixXd re = m.real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(re,
                                                      Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw ConvergenceFailure("sector: dense eigensolver failed");
    }
    const auto& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
  }
  const auto m = h.sparse();
  linalg::Vector start = linalg::Vector::Zero(static_cast<Eigen::Index>(h.dim()));
  start(0) = 1.0;  // the vacuum overlaps every displaced squeezed ground state
  const auto res = linalg::lanczos_lowest(
      [&m](const linalg::Vector& x, linalg::Vector& y) {
        linalg::spmv_serial(m, x.data(), y.data());
      },
      std::move(start), opt.lanczos);
  return {res.eigenvalue};
}

// Spectrum at one truncation. The combined variant is separable into its
// inner and outer pairs, so its ground energy is the sum of the two.
std::vector<double> spectrum_at(Variant v, const Rates& p, int n1, int n2,
                                int mech_dim, const SectorOptions& opt) {
  if (v == Variant::FullCombined) {
    Rates outer = p;
    outer.delta1 = outer.delta2 = 0.0;  // counted once, with the inner block
    const double e_in = spectrum_at(Variant::FullInner, p, n1, n2, mech_dim, opt)[0];
    const double e_out =
        spectrum_at(Variant::FullOuter, outer, n1, n2, mech_dim, opt)[0];
    return {e_in + e_out};
  }
  const auto h = build_sector(v, p, n1, n2, sector_layout(v, mech_dim));
  return block_spectrum(h, opt);
}

}  // namespace

SectorSpectrum sector_ground_energy(Variant v, const Rates& p, int n1, int n2,
                                    int mech_dim, const SectorOptions& opt) {
  if (is_effective(v)) {
    throw InvalidLayout("sector oracle needs a full (mechanical) variant");
  }
  if (mech_dim < SectorOptions::kMinMechDim) {
    throw TruncationTooSmall("sector (" + std::to_string(n1) + "," +
                             std::to_string(n2) + "): mech_dim " +
                             std::to_string(mech_dim) + " below minimum " +
                             std::to_string(SectorOptions::kMinMechDim));
  }
  require_stable(v, p);

  SectorSpectrum s;
  s.n1 = n1;
  s.n2 = n2;
  s.mech_dim = mech_dim;
  s.eigenvalues = spectrum_at(v, p, n1, n2, mech_dim, opt);
  s.ground_energy = s.eigenvalues.front();
  if (opt.check_truncation) {
    const double doubled =
        spectrum_at(v, p, n1, n2, 2 * mech_dim, opt).front();
    s.truncation_shift = std::abs(doubled - s.ground_energy);
    if (s.truncation_shift > opt.truncation_tolerance) {
      std::ostringstream msg;
      msg << "sector (" << n1 << "," << n2 << "): ground energy moves by "
          << s.truncation_shift << " when mech_dim is doubled from "
          << mech_dim << "; increase mech_dim";
      throw TruncationTooSmall(msg.str());
    }
  }
  return s;
}

std::vector<SectorSpectrum> sector_grid(Variant v, const Rates& p, int n_max,
                                        int mech_dim, linalg::Execution exec,
                                        const SectorOptions& opt) {
  if (n_max < 0) throw OutOfRange("sector_grid: n_max must be >= 0");
  const int side = n_max + 1;
  const int count = side * side;
  std::vector<SectorSpectrum> out(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));

  auto run = [&](int k) {
    try {
      out[static_cast<std::size_t>(k)] =
          sector_ground_energy(v, p, k / side, k % side, mech_dim, opt);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  };
  if (exec == linalg::Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < count; ++k) run(k);
  } else {
    for (int k = 0; k < count; ++k) run(k);
  }
  // Report the first failure in grid order so the outcome does not depend
  // on scheduling.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

EffectiveFit fit_grid(const std::vector<SectorSpectrum>& grid) {
  if (grid.size() < 6) {
    throw OutOfRange("fit: need at least six sectors for six coefficients");
  }
  const auto rows = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd A(rows, 6);
  Eigen::VectorXd y(rows);
  int n_max = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& s = grid[static_cast<std::size_t>(i)];
    const double a = s.n1, b = s.n2;
    A.row(i) << 1.0, a, b, a * a, b * b, a * b;
    y(i) = s.ground_energy;
    n_max = std::max({n_max, s.n1, s.n2});
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
  EffectiveFit f;
  f.c0 = c(0);
  f.c1 = c(1);
  f.c2 = c(2);
  f.c11 = c(3);
  f.c22 = c(4);
  f.c12 = c(5);
  f.residual = (A * c - y).cwiseAbs().maxCoeff();
  f.n_max = n_max;
  f.mech_dim = grid.front().mech_dim;
  return f;
}

EffectiveFit fit_effective(Variant v, const Rates& p, int n_max, int mech_dim,
                           linalg::Execution exec, const SectorOptions& opt) {
  if (n_max < 3) {
    throw OutOfRange("fit_effective: n_max must be at least 3");
  }
  return fit_grid(sector_grid(v, p, n_max, mech_dim, exec, opt));
}

IdentityReport verify_identities(const Rates& p, double tol) {
  const double w = p.omega_m, G = p.G_inner, g = p.g, G0 = p.G_outer;
  const double l1 = p.lambda1;
  const double nm1 = p.nu_minus_one;
  const double np1 = 2.0 + nm1;

  // Relative defect with an exact zero treated as a pass.
  auto rel = [](double lhs, double rhs, double scale) {
    const double d = std::abs(lhs - rhs);
    return scale > 0.0 ? d / scale : d;
  };
  auto rel2 = [&rel](double lhs, double rhs) {
    return rel(lhs, rhs, std::max(std::abs(lhs), std::abs(rhs)));
  };

  IdentityReport r;
  auto add = [&](std::string name, std::string expr, double defect) {
    r.checks.push_back({std::move(name), std::move(expr), defect, tol,
                        std::isfinite(defect) && defect < tol});
  };

  add("lambda1_squared", "lambda1^2 = omega_m (omega_m - 8G)",
      rel2(l1 * l1, w * (w - 8.0 * G)));
  add("nu_squared_minus_one", "sqrt(nu^2 - 1) = 4G / lambda1",
      rel2(std::sqrt(nm1 * np1), 4.0 * G / l1));
  const double mix = std::pow(std::sqrt(nm1) + std::sqrt(np1), 2);
  add("mixing_square", "(sqrt(nu-1) + sqrt(nu+1))^2 = 2 omega_m / lambda1",
      rel2(mix, 2.0 * w / l1));

  // Expand the elimination result over the number grid and compare with the
  // closed-form coefficients. Both sides are sums of terms that nearly
  // cancel (weak G on one side, G near omega_m/8 on the other), so the
  // defect is measured against the size of the summed terms.
  {
    const double a = g * g / (4.0 * l1) * mix;
    const double b = g * g / (2.0 * p.lambda2);
    double worst = 0.0;
    for (int n1 = 0; n1 <= 10; ++n1) {
      for (int n2 = 0; n2 <= 10; ++n2) {
        const double dm = n1 - n2, dp = n1 + n2;
        const double expanded = -a * dm * dm - b * dp * dp;
        const double closed =
            -p.sigma_inner * (n1 * n1 + n2 * n2) + p.gamma * n1 * n2;
        const double scale =
            std::max(a * dm * dm + b * dp * dp,
                     p.sigma_inner * (n1 * n1 + n2 * n2) + p.gamma * n1 * n2);
        worst = std::max(worst, rel(expanded, closed, scale));
      }
    }
    add("elimination_expansion",
        "-(g^2/4lambda1)(sqrt(nu-1)+sqrt(nu+1))^2 (n1-n2)^2 - (g^2/2lambda2)"
        "(n1+n2)^2 = gamma n1 n2 - sigma (n1^2+n2^2), n <= 10",
        worst);
  }
  add("squeezed_ratio", "g_s^2 / omega_s = g^2 / (omega_m - 4G0)",
      rel2(p.g_s * p.g_s / p.omega_s, g * g / (w - 4.0 * G0)));
  {
    double defect;
    try {
      const double G0c = solve_cancellation(G, w);
      defect = rel2(sigma_outer(g, G0c, SignConvention::Paper, w),
                    sigma_inner(g, G, w));
    } catch (const Error&) {
      defect = std::numeric_limits<double>::infinity();
    }
    add("cancellation", "G0 = omega_m G/(omega_m - 4G) => sigma_outer = sigma_inner",
        defect);
  }

  r.all_passed = std::all_of(r.checks.begin(), r.checks.end(),
                             [](const Check& c) { return c.passed; });
  r.ill_conditioned = l1 < 1e-3 * w;
  return r;
}

IdentitySweep identity_property_sweep(int draws, std::uint64_t seed,
                                      double tol) {
  std::mt19937_64 rng(seed);
  // Open intervals: nextafter keeps the lower end off zero.
  std::uniform_real_distribution<double> G(std::nextafter(0.0, 1.0), 0.12);
  std::uniform_real_distribution<double> G0(std::nextafter(0.0, 1.0), 0.24);
  std::uniform_real_distribution<double> g(std::nextafter(0.0, 1.0), 0.05);
  IdentitySweep s;
  s.draws = draws;
  for (int i = 0; i < draws; ++i) {
    RateInputs in;
    in.G_inner = G(rng);
    in.G_outer = G0(rng);
    in.g = g(rng);
    const auto report = verify_identities(derive_rates(in), tol);
    if (s.names.empty()) {
      for (const auto& c : report.checks) s.names.push_back(c.name);
      s.worst.assign(report.checks.size(), 0.0);
    }
    for (std::size_t k = 0; k < report.checks.size(); ++k) {
      s.worst[k] = std::max(s.worst[k], report.checks[k].defect);
    }
    if (!report.all_passed) ++s.failures;
  }
  s.all_passed = s.failures == 0;
  return s;
}

BogoliubovReport verify_bogoliubov(const Rates& p, const ModeLayout& layout,
                                   int trials, std::uint64_t seed,
                                   double tol, double recon_tol) {
  constexpr int kMinDim = 24;
  for (auto label : {labels::b1, labels::b2}) {
    if (!layout.contains(label)) {
      throw MissingMode("verify_bogoliubov: layout lacks mode '" +
                        std::string(label) + "'");
    }
    if (layout.dim(label) < kMinDim) {
      throw TruncationTooSmall("verify_bogoliubov: mode '" +
                               std::string(label) + "' has dim " +
                               std::to_string(layout.dim(label)) +
                               ", need at least " + std::to_string(kMinDim));
    }
  }
  const auto [B1, B2] = bogoliubov_ops(p, layout);
  const auto id = FockOperator::identity(layout);
  const std::vector<std::pair<std::string, FockOperator>> relations{
      {"[B1,B1^dag] - 1", commutator(B1, B1.adjoint()) - id},
      {"[B2,B2^dag] - 1", commutator(B2, B2.adjoint()) - id},
      {"[B1,B2^dag]", commutator(B1, B2.adjoint())},
      {"[B1,B2]", commutator(B1, B2)},
  };

  // Interior support: the commutators only see the truncation edge through
  // states within two quanta of it.
  const auto p1 = layout.position(labels::b1);
  const auto p2 = layout.position(labels::b2);
  const int lim1 = layout.dim(labels::b1) - 2;
  const int lim2 = layout.dim(labels::b2) - 2;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;

  std::vector<double> worst(relations.size(), 0.0);
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(
        static_cast<Eigen::Index>(layout.total_dim()));
    for (std::size_t k = 0; k < layout.total_dim(); ++k) {
      if (layout.occupation(k, p1) < lim1 && layout.occupation(k, p2) < lim2) {
        psi(static_cast<Eigen::Index>(k)) = cplx(normal(rng), normal(rng));
      }
    }
    psi.normalize();
    for (std::size_t i = 0; i < relations.size(); ++i) {
      const cplx e = psi.dot(relations[i].second.apply(psi));
      worst[i] = std::max(worst[i], std::abs(e));
    }
  }

  BogoliubovReport r;
  r.trials = trials;
  for (std::size_t i = 0; i < relations.size(); ++i) {
    r.checks.push_back({relations[i].first,
                        "interior expectation, absolute", worst[i], tol,
                        worst[i] < tol});
  }
  const auto [b1r, b2r] = mechanical_from_bogoliubov(p, B1, B2);
  const double d1 = (b1r - annihilator(layout, labels::b1)).max_abs();
  const double d2 = (b2r - annihilator(layout, labels::b2)).max_abs();
  r.checks.push_back({"b1 round trip", "max matrix-element defect", d1,
                      recon_tol, d1 < recon_tol});
  r.checks.push_back({"b2 round trip", "max matrix-element defect", d2,
                      recon_tol, d2 < recon_tol});
  r.all_passed = std::all_of(r.checks.begin(), r.checks.end(),
                             [](const Check& c) { return c.passed; });
  return r;
}

std::vector<double> outer_mode_spectrum(const Rates& p, int n, int mech_dim) {
  if (!(p.omega_m > 4.0 * p.G_outer)) {
    throw StabilityViolation("outer mode requires omega_m > 4G0");
  }
  const ModeLayout L({{std::string(labels::b01), mech_dim}});
  const auto b = annihilator(L, labels::b01);
  const auto bd = b.adjoint();
  FockOperator h = (p.omega_m - 2.0 * p.G_outer) * number_op(L, labels::b01);
  h -= (p.g * n) * (b + bd);
  h -= p.G_outer * (b * b + bd * bd);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.dense(),
                                                     Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

OuterSignFinding outer_sign_finding(const Rates& p, int n_max, int mech_dim,
                                    linalg::Execution exec, double tol) {
  Rates bare = p;
  bare.delta1 = bare.delta2 = 0.0;
  const auto fit = fit_effective(Variant::FullOuter, bare, n_max, mech_dim, exec);
  OuterSignFinding f;
  f.paper_coefficient = p.g_s * p.g_s / p.omega_s;
  f.derived_coefficient = -p.g * p.g / (p.omega_m - 4.0 * p.G_outer);
  f.fitted_c11 = fit.c11;
  f.fitted_c22 = fit.c22;
  f.magnitude_defect = std::abs(std::abs(fit.c11) - f.paper_coefficient);
  f.magnitude_matches = f.magnitude_defect < tol;
  f.paper_sign_matches =
      f.paper_coefficient == 0.0 || (fit.c11 > 0.0) == (f.paper_coefficient > 0.0);
  f.configured = p.sign;
  return f;
}

nlohmann::json to_json(const SectorSpectrum& s) {
  return {{"n1", s.n1},
          {"n2", s.n2},
          {"ground_energy", s.ground_energy},
          {"mech_dim", s.mech_dim},
          {"truncation_shift", s.truncation_shift},
          {"levels", s.eigenvalues.size()}};
}

nlohmann::json to_json(const EffectiveFit& f) {
  return {{"c0", f.c0},   {"c1", f.c1},   {"c2", f.c2},
          {"c11", f.c11}, {"c22", f.c22}, {"c12", f.c12},
          {"residual", f.residual}, {"n_max", f.n_max},
          {"mech_dim", f.mech_dim}};
}

nlohmann::json to_json(const Check& c) {
  return {{"name", c.name},
          {"expected", c.expression},
          {"defect", c.defect},
          {"tolerance", c.tolerance},
          {"pass", c.passed}};
}

namespace {
nlohmann::json checks_json(const std::vector<Check>& checks) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& c : checks) a.push_back(to_json(c));
  return a;
}
}  // namespace

nlohmann::json to_json(const IdentityReport& r) {
  return {{"checks", checks_json(r.checks)},
          {"pass", r.all_passed},
          {"ill_conditioned", r.ill_conditioned}};
}

nlohmann::json to_json(const IdentitySweep& s) {
  nlohmann::json worst = nlohmann::json::object();
  for (std::size_t k = 0; k < s.names.size(); ++k) worst[s.names[k]] = s.worst[k];
  return {{"draws", s.draws},
          {"failures", s.failures},
          {"worst_defect", worst},
          {"pass", s.all_passed}};
}

nlohmann::json to_json(const BogoliubovReport& r) {
  return {{"checks", checks_json(r.checks)},
          {"trials", r.trials},
          {"pass", r.all_passed}};
}

nlohmann::json to_json(const OuterSignFinding& f) {
  return {{"paper_coefficient", f.paper_coefficient},
          {"paper_expression", "+g_s^2/omega_s"},
          {"derived_coefficient", f.derived_coefficient},
          {"derived_expression", "-g^2/(omega_m - 4 G0)"},
          {"fitted_c11", f.fitted_c11},
          {"fitted_c22", f.fitted_c22},
          {"magnitude_defect", f.magnitude_defect},
          {"magnitude_matches", f.magnitude_matches},
          {"paper_sign_matches", f.paper_sign_matches},
          {"configured_sign", std::string(to_string(f.configured))},
          {"severity", "informational"}};
}

std::string sector_grid_csv(const std::vector<SectorSpectrum>& grid) {
  std::ostringstream out;
  out << "n1,n2,ground_energy,mech_dim\n";
  for (const auto& s : grid) {
    out << s.n1 << ',' << s.n2 << ',' << format_double(s.ground_energy) << ','
        << s.mech_dim << '\n';
  }
  return out.str();
}

}  // namespace cavqnd
