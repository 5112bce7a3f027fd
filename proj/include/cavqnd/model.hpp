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

// Hamiltonians of the coupled-cavity system, in units hbar = 1.
//
// Mode labels are fixed: photonic a1 (signal) and a2 (probe), inner mirrors
// b1 and b2, outer mirrors b01 and b02. Every variant conserves both photon
// numbers, so each builder also has a "sector" form in which n1 and n2 are
// plain numbers and only the mechanical modes remain.

#ifndef CAVQND_MODEL_HPP
#define CAVQND_MODEL_HPP

#include <string>
#include <string_view>
#include <utility>

#include "cavqnd/fock.hpp"
#include "cavqnd/params.hpp"

namespace cavqnd {

namespace labels {
inline constexpr std::string_view a1 = "a1";
inline constexpr std::string_view a2 = "a2";
inline constexpr std::string_view b1 = "b1";
inline constexpr std::string_view b2 = "b2";
inline constexpr std::string_view b01 = "b01";
inline constexpr std::string_view b02 = "b02";
}  // namespace labels

enum class Variant {
  FullInner,            // cavities coupled through q1, q2 (b1, b2)
  FullOuter,            // cavities coupled to the outer bodies (b01, b02)
  FullCombined,         // both mechanical pairs
  EffectiveIdeal,       // D1 n1 + D2 n2 + gamma n1 n2
  EffectiveSimplified,  // ideal - sigma_inner (n1^2 + n2^2), primed detunings
  EffectiveCombined,    // ideal + (sigma_outer - sigma_inner)(n1^2 + n2^2)
};

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view s);
bool is_effective(Variant v);

struct HamiltonianModel {
  Variant variant;
  FockOperator op;
  Rates params;
  bool number_conserving = false;

  const ModeLayout& layout() const { return op.layout(); }
};

/// Photonic modes a1, a2 followed by the mechanical modes the variant needs.
ModeLayout full_layout(Variant v, int photon_dim, int mech_dim);
/// Mechanical modes only, for sector blocks of the full variants.
ModeLayout sector_layout(Variant v, int mech_dim);

/// The layout must contain a1, a2, b1, b2; any other modes are spectators.
/// Throws MissingMode.
HamiltonianModel build_full_inner(const Rates& p, const ModeLayout& layout);
/// Needs a1, a2, b01, b02.
HamiltonianModel build_full_outer(const Rates& p, const ModeLayout& layout);
/// Needs a1, a2, b1, b2, b01, b02.
HamiltonianModel build_full_combined(const Rates& p, const ModeLayout& layout);

/// Diagonal photon-only Hamiltonians. sigma_scale multiplies every self-phase
/// coefficient. Needs a1 and a2.
HamiltonianModel build_effective(const Rates& p, Variant v,
                                 const ModeLayout& layout,
                                 double sigma_scale = 1.0);

/// Dispatches on the variant.
HamiltonianModel build(Variant v, const Rates& p, const ModeLayout& layout,
                       double sigma_scale = 1.0);

/// The mechanical block of a full variant at fixed photon numbers (n1, n2),
/// including the constant D1 n1 + D2 n2.
FockOperator build_sector(Variant v, const Rates& p, int n1, int n2,
                          const ModeLayout& mech_layout);

/// Normal-mode operators (B1, B2) of the inner mechanical pair on a layout
/// containing b1, b2. Throws StabilityViolation if nu is not finite.
std::pair<FockOperator, FockOperator> bogoliubov_ops(const Rates& p,
                                                     const ModeLayout& layout);

/// Inverse map: (b1, b2) expressed through B1, B1^dagger and B2.
std::pair<FockOperator, FockOperator> mechanical_from_bogoliubov(
    const Rates& p, const FockOperator& B1, const FockOperator& B2);

/// max |[H, n_i]| over the photonic modes present in the layout.
double number_conservation_defect(const FockOperator& H);

/// Sparse triplet export preceded by a one-line JSON header.
std::string export_hamiltonian(const HamiltonianModel& model);

}  // namespace cavqnd

#endif  // CAVQND_MODEL_HPP
