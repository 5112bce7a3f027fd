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

// Brute-force checks of the adiabatic elimination.
//
// At fixed photon numbers the mechanical problem is a displaced quadratic
// form, so its exact ground energy as a function of (n1, n2) is the effective
// photon Hamiltonian. The oracle diagonalizes each sector block numerically
// and fits the six monomial coefficients.

#ifndef CAVQND_REDUCE_HPP
#define CAVQND_REDUCE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cavqnd/linalg.hpp"
#include "cavqnd/model.hpp"
#include "cavqnd/params.hpp"

namespace cavqnd {

struct SectorOptions {
  static constexpr int kMinMechDim = 16;

  /// Ground energy must move by less than this when mech_dim is doubled.
  double truncation_tolerance = 1e-8;
  bool check_truncation = true;
  /// Blocks up to this size are diagonalized densely (full spectrum);
  /// larger ones go through Lanczos (ground energy only).
  std::size_t dense_limit = 576;
  linalg::LanczosOptions lanczos{};
};

struct SectorSpectrum {
  int n1 = 0, n2 = 0;
  std::vector<double> eigenvalues;  // ascending; only the ground for Lanczos
  double ground_energy = 0.0;
  int mech_dim = 0;
  double truncation_shift = 0.0;    // |E(2 mech_dim) - E(mech_dim)|, if checked
};

/// Throws TruncationTooSmall when mech_dim < 16 or when doubling mech_dim
/// moves the ground energy by more than the tolerance, StabilityViolation
/// outside the stable regime.
SectorSpectrum sector_ground_energy(Variant v, const Rates& p, int n1, int n2,
                                    int mech_dim,
                                    const SectorOptions& opt = {});

/// Every sector with n1, n2 <= n_max, row-major in (n1, n2). The parallel
/// path gives identical values in identical order.
std::vector<SectorSpectrum> sector_grid(
    Variant v, const Rates& p, int n_max, int mech_dim,
    linalg::Execution exec = linalg::Execution::Parallel,
    const SectorOptions& opt = {});

struct EffectiveFit {
  double c0 = 0.0;
  double c1 = 0.0, c2 = 0.0;
  double c11 = 0.0, c22 = 0.0;
  double c12 = 0.0;
  double residual = 0.0;  // max |fit - data| over the grid
  int n_max = 0;
  int mech_dim = 0;
};

/// Least-squares fit of the sector ground energies to
/// c0 + c1 n1 + c2 n2 + c11 n1^2 + c22 n2^2 + c12 n1 n2. Requires n_max >= 3.
EffectiveFit fit_effective(Variant v, const Rates& p, int n_max = 3,
                           int mech_dim = 60,
                           linalg::Execution exec = linalg::Execution::Parallel,
                           const SectorOptions& opt = {});
EffectiveFit fit_grid(const std::vector<SectorSpectrum>& grid);

struct Check {
  std::string name;
  std::string expression;
  double defect = 0.0;  // relative unless stated in the expression
  double tolerance = 0.0;
  bool passed = false;
};

struct IdentityReport {
  std::vector<Check> checks;
  bool all_passed = false;
  bool ill_conditioned = false;  // lambda1 small against omega_m
};

/// The six closed-form identities behind the effective Hamiltonian. Always
/// returns a report.
IdentityReport verify_identities(const Rates& p, double tolerance = 1e-12);

struct IdentitySweep {
  int draws = 0;
  int failures = 0;
  std::vector<std::string> names;
  std::vector<double> worst;  // per identity, over all draws
  bool all_passed = false;
};

/// verify_identities over random admissible rates: omega_m = 1,
/// G in (0, 0.12), G0 in (0, 0.24), g in (0, 0.05).
IdentitySweep identity_property_sweep(int draws, std::uint64_t seed = 1,
                                      double tolerance = 1e-12);

struct BogoliubovReport {
  std::vector<Check> checks;
  int trials = 0;
  bool all_passed = false;
};

/// Commutators of (B1, B2) on random states supported below dim - 2, and
/// the inverse map on every matrix element. layout must hold b1 and b2 with
/// dims >= 24 (TruncationTooSmall otherwise).
BogoliubovReport verify_bogoliubov(const Rates& p, const ModeLayout& layout,
                                   int trials = 16, std::uint64_t seed = 1,
                                   double tolerance = 1e-9,
                                   double reconstruction_tolerance = 1e-12);

/// Dense spectrum of one outer mirror at photon number n: the block
/// (w - 2G0) b^dag b - g n (b + b^dag) - G0 (b^2 + b^dag2).
std::vector<double> outer_mode_spectrum(const Rates& p, int n, int mech_dim);

/// The self-phase coefficient of the outer mirrors: the closed form as
/// printed next to the oracle's fitted value.
struct OuterSignFinding {
  double paper_coefficient = 0.0;    // +g_s^2 / omega_s
  double derived_coefficient = 0.0;  // -g^2 / (omega_m - 4 G0)
  double fitted_c11 = 0.0;
  double fitted_c22 = 0.0;
  double magnitude_defect = 0.0;     // ||c11| - g_s^2/omega_s|
  bool magnitude_matches = false;
  bool paper_sign_matches = false;
  SignConvention configured = SignConvention::Paper;
};

OuterSignFinding outer_sign_finding(const Rates& p, int n_max = 3,
                                    int mech_dim = 60,
                                    linalg::Execution exec =
                                        linalg::Execution::Parallel,
                                    double tolerance = 1e-8);

nlohmann::json to_json(const SectorSpectrum& s);
nlohmann::json to_json(const EffectiveFit& f);
nlohmann::json to_json(const Check& c);
nlohmann::json to_json(const IdentityReport& r);
nlohmann::json to_json(const IdentitySweep& s);
nlohmann::json to_json(const BogoliubovReport& r);
nlohmann::json to_json(const OuterSignFinding& f);

/// n1,n2,ground_energy,mech_dim with 17 significant digits.
std::string sector_grid_csv(const std::vector<SectorSpectrum>& grid);

}  // namespace cavqnd

#endif  // CAVQND_REDUCE_HPP
