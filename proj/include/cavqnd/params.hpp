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

// Physical configuration of the two charged optomechanical cavities and the
// closed-form quantities derived from it.
//
// Two parameter blocks are produced for every configuration: one in SI
// units (rad/s, m, N) and one in units where hbar = 1 and omega_m = 1. All
// simulations run on the second block, since the effective Hamiltonians only
// depend on ratios such as g/omega_m and G/omega_m.

#ifndef CAVQND_PARAMS_HPP
#define CAVQND_PARAMS_HPP

#include <string_view>
#include <utility>

namespace cavqnd {

/// Sign of the self-phase term produced by eliminating the squeezed outer
/// modes. `Paper` uses +g_s^2/omega_s, which is what makes the cancellation
/// condition work. `Derived` uses the sign that the elimination algebra (and
/// exact diagonalization) actually produces, -g_s^2/omega_s.
enum class SignConvention { Paper, Derived };

std::string_view to_string(SignConvention s);
SignConvention sign_convention_from_string(std::string_view s);

/// Lab-frame parameters, SI units.
struct PhysicalConfig {
  double omega_c = 0.0;        // optical angular frequency (rad/s)
  double omega_m = 0.0;        // mechanical angular frequency (rad/s)
  double mass = 0.0;           // kg
  double cavity_length = 0.0;  // L (m)
  double r0 = 0.0;             // inner-charge separation (m)
  double R0 = 0.0;             // outer-charge separation (m)
  double q1 = 0.0, q2 = 0.0;   // charges on the inner mirrors (C)
  double q01 = 0.0, q00 = 0.0; // left outer mirror and left fixed body (C)
  double q02 = 0.0, q22 = 0.0; // right outer mirror and right fixed body (C)
  double coulomb_k = 8.9875517923e9;  // N m^2 / C^2
  double hbar = 1.054571817e-34;      // J s

  double geometry_ratio_max = 1e-2;
  SignConvention appendix_a_sign = SignConvention::Paper;

  double rho() const { return coulomb_k * q1 * q2; }
  double rho0() const { return coulomb_k * q01 * q00; }
};

/// Inputs from which every frequency-like quantity follows. Any consistent
/// frequency unit works; the library uses rad/s and omega_m = 1.
struct RateInputs {
  double omega_m = 1.0;
  double g = 0.0;        // single-photon optomechanical coupling
  double G_inner = 0.0;  // spring shift from the q1-q2 interaction
  double G_outer = 0.0;  // spring shift from the outer charged bodies
  double delta1 = 0.0, delta2 = 0.0;      // cavity detunings, full model
  double delta1_s = 0.0, delta2_s = 0.0;  // cavity detunings, simplified model
  SignConvention sign = SignConvention::Paper;
};

/// Closed-form rates. Constant energy offsets (chi) are reported here but
/// never enter any dynamics.
struct Rates {
  double omega_m = 1.0;
  double g = 0.0;
  double G_inner = 0.0;
  double G_outer = 0.0;
  double delta1 = 0.0, delta2 = 0.0;
  double delta1_s = 0.0, delta2_s = 0.0;

  // Normal modes of the inner mechanical pair.
  double lambda1 = 1.0;       // sqrt(omega_m (omega_m - 8 G))
  double lambda2 = 1.0;       // omega_m
  double nu = 1.0;            // (lambda2 - 4 G) / lambda1
  double nu_minus_one = 0.0;  // nu - 1 without cancellation
  double chi = 0.0;           // (omega_m - 4 G - lambda1) / 2

  // Squeezed frame of the outer mirrors.
  double r_squeeze = 0.0;
  double omega_s = 1.0;
  double g_s = 0.0;

  // Effective photon-only Hamiltonian coefficients. The self-phase terms
  // enter as -sigma_inner (n1^2 + n2^2) and +sigma_outer (n1^2 + n2^2);
  // sigma_outer carries the sign of the selected convention.
  double gamma = 0.0;
  double sigma_inner = 0.0;
  double sigma_outer = 0.0;
  SignConvention sign = SignConvention::Paper;
};

/// Evaluates every closed-form rate. Throws StabilityViolation unless
/// omega_m > 8 G_inner and omega_m > 4 G_outer, SignViolation for negative
/// spring shifts (repulsive nearest charges).
Rates derive_rates(const RateInputs& in);

/// Detunings that replace the optical-scale lab-frame values in the
/// dimensionless block (rotating frame, units of omega_m).
struct DetuningOverride {
  double delta1 = 0.0;
  double delta2 = 0.0;
};

struct DerivedParams {
  double rho = 0.0;          // k q1 q2 (J m)
  double rho0 = 0.0;         // k q01 q00 (J m)
  double alpha_force = 0.0;  // k q1 q2 / r0^2 (N)
  double d1 = 0.0, d2 = 0.0;    // inner equilibrium displacements (m)
  double d01 = 0.0, d02 = 0.0;  // outer equilibrium displacements (m)
  double Q_inner = 0.0;      // -rho / r0^3 (N/m)
  double Q_outer = 0.0;      // -rho0 / R0^3 (N/m)
  double g0 = 0.0;           // omega_c / L (rad/(s m))
  double x_zpf = 0.0;        // sqrt(hbar / (2 m omega_m)) (m)
  double V0_inner = 0.0;     // rho / r0 (J), constant dropped from dynamics
  double V0_outer = 0.0;     // 2 rho0 / R0 (J), constant dropped from dynamics

  Rates si;      // rad/s, lab-frame detunings
  Rates scaled;  // units of omega_m, detunings from the override
};

/// Derives all closed-form quantities. Throws SignViolation,
/// GeometryViolation or StabilityViolation when the configuration lies
/// outside the regime in which the effective description holds.
DerivedParams derive_params(const PhysicalConfig& cfg,
                            const DetuningOverride& detuning = {});

/// Outer spring shift that cancels the self-phase terms, omega_m G / (omega_m - 4 G).
double solve_cancellation(double G_inner, double omega_m = 1.0);

double cross_kerr(double g, double G_inner, double omega_m = 1.0);
double sigma_inner(double g, double G_inner, double omega_m = 1.0);
double sigma_outer(double g, double G_outer, SignConvention sign,
                   double omega_m = 1.0);

struct EquilibriumOptions {
  double gradient_tolerance = 1e-13;  // on the potential scaled by m omega_m^2 r0^2
  int max_iterations = 200;
};

/// Minimizes the exact (unexpanded) inner potential
///   rho / (r0 + x2 - x1) + m omega_m^2 (x1^2 + x2^2) / 2
/// by damped Newton iteration. Returns (x1*, x2*) in metres.
std::pair<double, double> find_equilibrium_numeric(
    const PhysicalConfig& cfg, const EquilibriumOptions& opt = {});

/// Same for the outer pair, (x01*, x02*).
std::pair<double, double> find_outer_equilibrium_numeric(
    const PhysicalConfig& cfg, const EquilibriumOptions& opt = {});

}  // namespace cavqnd

#endif  // CAVQND_PARAMS_HPP
