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

#include "cavqnd/params.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "cavqnd/errors.hpp"

namespace cavqnd {

namespace {

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string(name) + " must be positive and finite, got " +
                      fmt_num(v));
  }
}

void check_stability(double omega_m, double G_inner, double G_outer) {
  if (!(omega_m > 8.0 * G_inner)) {
    throw StabilityViolation("condition omega_m > 8G violated: omega_m = " +
                             fmt_num(omega_m) + ", 8G = " +
                             fmt_num(8.0 * G_inner));
  }
  if (!(omega_m > 4.0 * G_outer)) {
    throw StabilityViolation("condition omega_m > 4G0 violated: omega_m = " +
                             fmt_num(omega_m) + ", 4G0 = " +
                             fmt_num(4.0 * G_outer));
  }
}

}  // namespace

std::string_view to_string(SignConvention s) {
  return s == SignConvention::Paper ? "paper" : "derived";
}

SignConvention sign_convention_from_string(std::string_view s) {
  if (s == "paper") return SignConvention::Paper;
  if (s == "derived") return SignConvention::Derived;
  throw ConfigError("appendix_a_sign must be 'paper' or 'derived', got '" +
                    std::string(s) + "'");
}

double cross_kerr(double g, double G_inner, double omega_m) {
  return g * g * 8.0 * G_inner / (omega_m * (omega_m - 8.0 * G_inner));
}

double sigma_inner(double g, double G_inner, double omega_m) {
  return g * g * (omega_m - 4.0 * G_inner) /
         (omega_m * (omega_m - 8.0 * G_inner));
}

double sigma_outer(double g, double G_outer, SignConvention sign,
                   double omega_m) {
  // g_s^2 / omega_s collapses to g^2 / (omega_m - 4 G0).
  const double magnitude = g * g / (omega_m - 4.0 * G_outer);
  return sign == SignConvention::Paper ? magnitude : -magnitude;
}

Rates derive_rates(const RateInputs& in) {
  if (!(in.omega_m > 0.0)) {
    throw StabilityViolation("omega_m must be positive");
  }
  if (in.G_inner < 0.0 || in.G_outer < 0.0) {
    throw SignViolation(
        "spring shifts must be non-negative (nearest charges attract)");
  }
  check_stability(in.omega_m, in.G_inner, in.G_outer);

  Rates r;
  r.omega_m = in.omega_m;
  r.g = in.g;
  r.G_inner = in.G_inner;
  r.G_outer = in.G_outer;
  r.delta1 = in.delta1;
  r.delta2 = in.delta2;
  r.delta1_s = in.delta1_s;
  r.delta2_s = in.delta2_s;
  r.sign = in.sign;

  const double w = in.omega_m;
  const double G = in.G_inner;
  r.lambda1 = std::sqrt(w * (w - 8.0 * G));
  r.lambda2 = w;
  r.nu = (r.lambda2 - 4.0 * G) / r.lambda1;
  // (w - 4G)^2 - lambda1^2 = 16 G^2, so chi has no cancellation in this form.
  r.chi = 8.0 * G * G / (w - 4.0 * G + r.lambda1);
  r.nu_minus_one = 2.0 * r.chi / r.lambda1;

  const double G0 = in.G_outer;
  r.r_squeeze = -0.25 * std::log1p(-4.0 * G0 / w);
  r.omega_s = std::sqrt(w * (w - 4.0 * G0));
  r.g_s = in.g * std::exp(r.r_squeeze);

  r.gamma = cross_kerr(in.g, G, w);
  r.sigma_inner = sigma_inner(in.g, G, w);
  r.sigma_outer = sigma_outer(in.g, G0, in.sign, w);
  return r;
}

double solve_cancellation(double G_inner, double omega_m) {
  if (G_inner < 0.0) {
    throw SignViolation("G must be non-negative");
  }
  if (!(omega_m > 8.0 * G_inner)) {
    throw StabilityViolation("condition omega_m > 8G violated: G = " +
                             fmt_num(G_inner));
  }
  const double G0 = omega_m * G_inner / (omega_m - 4.0 * G_inner);
  if (!(G0 < 0.25 * omega_m)) {
    throw StabilityViolation(
        "cancelling G0 = " + fmt_num(G0) +
        " reaches omega_m/4, squeezing parameter undefined");
  }
  return G0;
}

DerivedParams derive_params(const PhysicalConfig& cfg,
                            const DetuningOverride& detuning) {
  require_positive(cfg.omega_c, "omega_c");
  require_positive(cfg.omega_m, "omega_m");
  require_positive(cfg.mass, "mass");
  require_positive(cfg.cavity_length, "cavity_length");
  require_positive(cfg.r0, "r0");
  require_positive(cfg.R0, "R0");
  require_positive(cfg.coulomb_k, "coulomb_k");
  require_positive(cfg.hbar, "hbar");

  const double rho = cfg.rho();
  const double rho0 = cfg.rho0();
  if (!(rho < 0.0)) {
    throw SignViolation("rho = k q1 q2 must be negative, got " + fmt_num(rho));
  }
  if (!(rho0 < 0.0)) {
    throw SignViolation("rho0 = k q01 q00 must be negative, got " +
                        fmt_num(rho0));
  }
  const double rho0_right = cfg.coulomb_k * cfg.q22 * cfg.q02;
  if (std::abs(rho0 - rho0_right) > 1e-12 * std::abs(rho0)) {
    throw ConfigError("outer charges must be symmetric: k q01 q00 = " +
                      fmt_num(rho0) + " but k q22 q02 = " +
                      fmt_num(rho0_right));
  }
  if (!(cfg.r0 / cfg.cavity_length < cfg.geometry_ratio_max)) {
    throw GeometryViolation("r0/L = " + fmt_num(cfg.r0 / cfg.cavity_length) +
                            " must stay below " +
                            fmt_num(cfg.geometry_ratio_max));
  }
  if (!(cfg.R0 / cfg.cavity_length < cfg.geometry_ratio_max)) {
    throw GeometryViolation("R0/L = " + fmt_num(cfg.R0 / cfg.cavity_length) +
                            " must stay below " +
                            fmt_num(cfg.geometry_ratio_max));
  }

  const double m = cfg.mass;
  const double w = cfg.omega_m;
  const double kspring = m * w * w;

  DerivedParams p;
  p.rho = rho;
  p.rho0 = rho0;
  p.alpha_force = rho / (cfg.r0 * cfg.r0);
  // Minima of the quadratically expanded potentials.
  p.d1 = -p.alpha_force * cfg.r0 / (kspring * cfg.r0 + 4.0 * p.alpha_force);
  p.d2 = -p.d1;
  p.d01 = rho0 / (kspring * cfg.R0 * cfg.R0 + 2.0 * rho0 / cfg.R0);
  p.d02 = -p.d01;
  p.Q_inner = -rho / (cfg.r0 * cfg.r0 * cfg.r0);
  p.Q_outer = -rho0 / (cfg.R0 * cfg.R0 * cfg.R0);
  p.g0 = cfg.omega_c / cfg.cavity_length;
  p.x_zpf = std::sqrt(cfg.hbar / (2.0 * m * w));
  p.V0_inner = rho / cfg.r0;
  p.V0_outer = 2.0 * rho0 / cfg.R0;

  RateInputs si;
  si.omega_m = w;
  si.g = p.g0 * p.x_zpf;
  si.G_inner = p.Q_inner / (2.0 * m * w);
  si.G_outer = p.Q_outer / (2.0 * m * w);
  si.delta1 = cfg.omega_c - p.g0 * (p.d1 + p.d01);
  si.delta2 = cfg.omega_c - p.g0 * (p.d2 + p.d02);
  si.delta1_s = cfg.omega_c + p.g0 * p.d1;
  si.delta2_s = cfg.omega_c + p.g0 * p.d2;
  si.sign = cfg.appendix_a_sign;
  p.si = derive_rates(si);

  RateInputs scaled;
  scaled.omega_m = 1.0;
  scaled.g = si.g / w;
  scaled.G_inner = si.G_inner / w;
  scaled.G_outer = si.G_outer / w;
  scaled.delta1 = detuning.delta1;
  scaled.delta2 = detuning.delta2;
  scaled.delta1_s = detuning.delta1;
  scaled.delta2_s = detuning.delta2;
  scaled.sign = cfg.appendix_a_sign;
  p.scaled = derive_rates(scaled);
  return p;
}

namespace {

// Damped Newton on a smooth 2D function with analytic derivatives.
template <class Fn>
std::pair<double, double> newton2(Fn&& fn, const EquilibriumOptions& opt,
                                  const char* what) {
  double y1 = 0.0, y2 = 0.0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    double v, g1, g2, h11, h12, h22;
    if (!fn(y1, y2, v, g1, g2, h11, h12, h22)) break;
    const double gnorm = std::hypot(g1, g2);
    if (gnorm < opt.gradient_tolerance) return {y1, y2};
    const double det = h11 * h22 - h12 * h12;
    if (!(h11 > 0.0) || !(det > 0.0)) {
      throw ConvergenceFailure(std::string(what) +
                               ": potential has no local minimum near the "
                               "origin (pull-in regime)");
    }
    const double s1 = -(h22 * g1 - h12 * g2) / det;
    const double s2 = -(h11 * g2 - h12 * g1) / det;
    double step = 1.0;
    for (int k = 0; k < 60; ++k) {
      double vn, a, b, c, d, e;
      if (fn(y1 + step * s1, y2 + step * s2, vn, a, b, c, d, e) &&
          vn <= v + 1e-4 * step * (g1 * s1 + g2 * s2)) {
        break;
      }
      step *= 0.5;
    }
    y1 += step * s1;
    y2 += step * s2;
  }
  throw ConvergenceFailure(std::string(what) +
                           ": gradient norm did not fall below tolerance");
}

}  // namespace

std::pair<double, double> find_equilibrium_numeric(
    const PhysicalConfig& cfg, const EquilibriumOptions& opt) {
  require_positive(cfg.omega_m, "omega_m");
  require_positive(cfg.mass, "mass");
  require_positive(cfg.r0, "r0");
  // Lengths in units of r0, energies in units of m omega_m^2 r0^2.
  const double kappa =
      cfg.rho() / (cfg.mass * cfg.omega_m * cfg.omega_m * cfg.r0 * cfg.r0 *
                   cfg.r0);
  auto fn = [kappa](double y1, double y2, double& v, double& g1, double& g2,
                    double& h11, double& h12, double& h22) {
    const double u = 1.0 + y2 - y1;
    if (!(u > 0.0)) return false;
    const double u2 = u * u;
    const double c = 2.0 * kappa / (u2 * u);
    v = kappa / u + 0.5 * (y1 * y1 + y2 * y2);
    g1 = kappa / u2 + y1;
    g2 = -kappa / u2 + y2;
    h11 = c + 1.0;
    h22 = c + 1.0;
    h12 = -c;
    return true;
  };
  auto [y1, y2] = newton2(fn, opt, "inner equilibrium");
  return {y1 * cfg.r0, y2 * cfg.r0};
}

std::pair<double, double> find_outer_equilibrium_numeric(
    const PhysicalConfig& cfg, const EquilibriumOptions& opt) {
  require_positive(cfg.omega_m, "omega_m");
  require_positive(cfg.mass, "mass");
  require_positive(cfg.R0, "R0");
  const double R3 = cfg.R0 * cfg.R0 * cfg.R0;
  const double k_left = cfg.rho0() / (cfg.mass * cfg.omega_m * cfg.omega_m * R3);
  const double k_right = cfg.coulomb_k * cfg.q22 * cfg.q02 /
                         (cfg.mass * cfg.omega_m * cfg.omega_m * R3);
  // Left body sits at distance R0 + x01, right body at R0 - x02.
  auto fn = [k_left, k_right](double y1, double y2, double& v, double& g1,
                              double& g2, double& h11, double& h12,
                              double& h22) {
    const double u1 = 1.0 + y1;
    const double u2 = 1.0 - y2;
    if (!(u1 > 0.0) || !(u2 > 0.0)) return false;
    v = k_left / u1 + k_right / u2 + 0.5 * (y1 * y1 + y2 * y2);
    g1 = -k_left / (u1 * u1) + y1;
    g2 = k_right / (u2 * u2) + y2;
    h11 = 2.0 * k_left / (u1 * u1 * u1) + 1.0;
    h22 = 2.0 * k_right / (u2 * u2 * u2) + 1.0;
    h12 = 0.0;
    return true;
  };
  auto [y1, y2] = newton2(fn, opt, "outer equilibrium");
  return {y1 * cfg.R0, y2 * cfg.R0};
}

}  // namespace cavqnd
