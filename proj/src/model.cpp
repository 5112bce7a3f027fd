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

#include "cavqnd/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cavqnd/errors.hpp"
#include "cavqnd/io.hpp"

namespace cavqnd {

namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr double kConservationTolerance = 1e-12;

void require_modes(const ModeLayout& layout,
                   std::initializer_list<std::string_view> wanted,
                   std::string_view who) {
  for (auto label : wanted) {
    if (!layout.contains(label)) {
      throw MissingMode(std::string(who) + ": layout " + describe(layout) +
                        " lacks mode '" + std::string(label) + "'");
    }
  }
}

FockOperator quadrature(const ModeLayout& L, std::string_view label) {
  auto b = annihilator(L, label);
  return b.adjoint() + b;
}

FockOperator squares(const ModeLayout& L, std::string_view label) {
  auto b = annihilator(L, label);
  auto bd = b.adjoint();
  return bd * bd + b * b;
}

// Inner mirrors: (w - 2G)(n_b1 + n_b2) - g n1 x1 - g n2 x2
//                - G (b1^2 + b1^dag2 + b2^2 + b2^dag2 - 2 x1 x2).
// n1 and n2 are operators on L so the same code serves full and sector forms.
FockOperator inner_terms(const Rates& p, const ModeLayout& L,
                         const FockOperator& n1, const FockOperator& n2) {
  const auto x1 = quadrature(L, labels::b1);
  const auto x2 = quadrature(L, labels::b2);
  FockOperator h = (p.omega_m - 2.0 * p.G_inner) *
                   (number_op(L, labels::b1) + number_op(L, labels::b2));
  h -= p.g * (n1 * x1);
  h -= p.g * (n2 * x2);
  h -= p.G_inner *
       (squares(L, labels::b1) + squares(L, labels::b2) - 2.0 * (x1 * x2));
  return h;
}

// Outer mirrors: each cavity pushes its own charged body; no cross term.
FockOperator outer_terms(const Rates& p, const ModeLayout& L,
                         const FockOperator& n1, const FockOperator& n2) {
  FockOperator h = (p.omega_m - 2.0 * p.G_outer) *
                   (number_op(L, labels::b01) + number_op(L, labels::b02));
  h -= p.g * (n1 * quadrature(L, labels::b01));
  h -= p.g * (n2 * quadrature(L, labels::b02));
  h -= p.G_outer * (squares(L, labels::b01) + squares(L, labels::b02));
  return h;
}

HamiltonianModel finish(Variant v, FockOperator h, const Rates& p) {
  h.mark_hermitian(kHermitianTolerance);
  const double scale = std::max(1.0, h.max_abs());
  const bool conserving =
      number_conservation_defect(h) <= kConservationTolerance * scale;
  return HamiltonianModel{v, std::move(h), p, conserving};
}

FockOperator detuning(const Rates& p, const ModeLayout& L) {
  return p.delta1 * number_op(L, labels::a1) +
         p.delta2 * number_op(L, labels::a2);
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::FullInner: return "full-inner";
    case Variant::FullOuter: return "full-outer";
    case Variant::FullCombined: return "full-combined";
    case Variant::EffectiveIdeal: return "ideal";
    case Variant::EffectiveSimplified: return "simplified";
    case Variant::EffectiveCombined: return "combined";
  }
  return "unknown";
}

Variant variant_from_string(std::string_view s) {
  for (auto v : {Variant::FullInner, Variant::FullOuter, Variant::FullCombined,
                 Variant::EffectiveIdeal, Variant::EffectiveSimplified,
                 Variant::EffectiveCombined}) {
    if (s == to_string(v)) return v;
  }
  throw ConfigError("unknown Hamiltonian variant '" + std::string(s) +
                    "' (expected full-inner, full-outer, full-combined, "
                    "ideal, simplified or combined)");
}

bool is_effective(Variant v) {
  return v == Variant::EffectiveIdeal || v == Variant::EffectiveSimplified ||
         v == Variant::EffectiveCombined;
}

ModeLayout sector_layout(Variant v, int mech_dim) {
  switch (v) {
    case Variant::FullInner:
      return ModeLayout({{"b1", mech_dim}, {"b2", mech_dim}});
    case Variant::FullOuter:
      return ModeLayout({{"b01", mech_dim}, {"b02", mech_dim}});
    case Variant::FullCombined:
      return ModeLayout({{"b1", mech_dim}, {"b2", mech_dim},
                         {"b01", mech_dim}, {"b02", mech_dim}});
    default:
      throw InvalidLayout("effective variants have no mechanical modes");
  }
}

ModeLayout full_layout(Variant v, int photon_dim, int mech_dim) {
  std::vector<Mode> modes{{"a1", photon_dim}, {"a2", photon_dim}};
  if (!is_effective(v)) {
    const auto mech = sector_layout(v, mech_dim);
    for (const auto& m : mech.modes()) modes.push_back(m);
  }
  return ModeLayout(std::move(modes));
}

HamiltonianModel build_full_inner(const Rates& p, const ModeLayout& layout) {
  require_modes(layout, {labels::a1, labels::a2, labels::b1, labels::b2},
                "build_full_inner");
  auto h = detuning(p, layout) +
           inner_terms(p, layout, number_op(layout, labels::a1),
                       number_op(layout, labels::a2));
  return finish(Variant::FullInner, std::move(h), p);
}

HamiltonianModel build_full_outer(const Rates& p, const ModeLayout& layout) {
  require_modes(layout, {labels::a1, labels::a2, labels::b01, labels::b02},
                "build_full_outer");
  auto h = detuning(p, layout) +
           outer_terms(p, layout, number_op(layout, labels::a1),
                       number_op(layout, labels::a2));
  return finish(Variant::FullOuter, std::move(h), p);
}

HamiltonianModel build_full_combined(const Rates& p, const ModeLayout& layout) {
  require_modes(layout,
                {labels::a1, labels::a2, labels::b1, labels::b2, labels::b01,
                 labels::b02},
                "build_full_combined");
  const auto n1 = number_op(layout, labels::a1);
  const auto n2 = number_op(layout, labels::a2);
  auto h = detuning(p, layout) + inner_terms(p, layout, n1, n2) +
           outer_terms(p, layout, n1, n2);
  return finish(Variant::FullCombined, std::move(h), p);
}

HamiltonianModel build_effective(const Rates& p, Variant v,
                                 const ModeLayout& layout, double sigma_scale) {
  if (!is_effective(v)) {
    throw InvalidLayout("build_effective: " + std::string(to_string(v)) +
                        " is not an effective variant");
  }
  require_modes(layout, {labels::a1, labels::a2}, "build_effective");

  double d1 = p.delta1, d2 = p.delta2, self = 0.0;
  switch (v) {
    case Variant::EffectiveSimplified:
      d1 = p.delta1_s;
      d2 = p.delta2_s;
      self = -p.sigma_inner;
      break;
    case Variant::EffectiveCombined:
      self = p.sigma_outer - p.sigma_inner;
      break;
    default:
      break;
  }
  self *= sigma_scale;

  const auto i1 = layout.position(labels::a1);
  const auto i2 = layout.position(labels::a2);
  Eigen::VectorXcd diag(static_cast<Eigen::Index>(layout.total_dim()));
  for (std::size_t k = 0; k < layout.total_dim(); ++k) {
    const double n1 = layout.occupation(k, i1);
    const double n2 = layout.occupation(k, i2);
    diag(static_cast<Eigen::Index>(k)) =
        d1 * n1 + d2 * n2 + p.gamma * n1 * n2 + self * (n1 * n1 + n2 * n2);
  }
  return finish(v, FockOperator::diagonal(layout, diag), p);
}

HamiltonianModel build(Variant v, const Rates& p, const ModeLayout& layout,
                       double sigma_scale) {
  switch (v) {
    case Variant::FullInner: return build_full_inner(p, layout);
    case Variant::FullOuter: return build_full_outer(p, layout);
    case Variant::FullCombined: return build_full_combined(p, layout);
    default: return build_effective(p, v, layout, sigma_scale);
  }
}

FockOperator build_sector(Variant v, const Rates& p, int n1, int n2,
                          const ModeLayout& mech) {
  if (is_effective(v)) {
    throw InvalidLayout("build_sector: effective variants have no sector block");
  }
  if (n1 < 0 || n2 < 0) {
    throw OutOfRange("build_sector: photon numbers must be non-negative");
  }
  const auto id = FockOperator::identity(mech);
  const auto s1 = static_cast<double>(n1) * id;
  const auto s2 = static_cast<double>(n2) * id;
  FockOperator h = (p.delta1 * n1 + p.delta2 * n2) * id;
  if (v != Variant::FullOuter) {
    require_modes(mech, {labels::b1, labels::b2}, "build_sector");
    h += inner_terms(p, mech, s1, s2);
  }
  if (v != Variant::FullInner) {
    require_modes(mech, {labels::b01, labels::b02}, "build_sector");
    h += outer_terms(p, mech, s1, s2);
  }
  h.mark_hermitian(kHermitianTolerance);
  return h;
}

std::pair<FockOperator, FockOperator> bogoliubov_ops(const Rates& p,
                                                     const ModeLayout& layout) {
  require_modes(layout, {labels::b1, labels::b2}, "bogoliubov_ops");
  if (!std::isfinite(p.nu) || !(p.nu_minus_one >= 0.0)) {
    throw StabilityViolation(
        "bogoliubov_ops: mixing parameter undefined, requires omega_m > 8G");
  }
  const double u = std::sqrt(2.0 + p.nu_minus_one) / 2.0;  // sqrt(nu+1)/2
  const double w = std::sqrt(p.nu_minus_one) / 2.0;        // sqrt(nu-1)/2
  const auto b1 = annihilator(layout, labels::b1);
  const auto b2 = annihilator(layout, labels::b2);
  auto B1 = u * b1 - w * b1.adjoint() - u * b2 + w * b2.adjoint();
  auto B2 = M_SQRT1_2 * (b1 + b2);
  return {std::move(B1), std::move(B2)};
}

std::pair<FockOperator, FockOperator> mechanical_from_bogoliubov(
    const Rates& p, const FockOperator& B1, const FockOperator& B2) {
  // u^2 - w^2 = 1/2, so b1 - b2 = 2 (u B1 + w B1^dag) and b1 + b2 = sqrt2 B2.
  const double u = std::sqrt(2.0 + p.nu_minus_one) / 2.0;
  const double w = std::sqrt(p.nu_minus_one) / 2.0;
  const auto diff = u * B1 + w * B1.adjoint();
  const auto sum = M_SQRT1_2 * B2;
  return {sum + diff, sum - diff};
}

double number_conservation_defect(const FockOperator& h) {
  double worst = 0.0;
  for (auto label : {labels::a1, labels::a2}) {
    if (!h.layout().contains(label)) continue;
    worst = std::max(worst,
                     commutator(h, number_op(h.layout(), label)).max_abs());
  }
  return worst;
}

std::string export_hamiltonian(const HamiltonianModel& model) {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& m : model.layout().modes()) {
    modes.push_back({{"label", m.label}, {"dim", m.dim}});
  }
  nlohmann::json header{{"variant", std::string(to_string(model.variant))},
                        {"params_hash", rates_hash(model.params)},
                        {"layout", modes},
                        {"number_conserving", model.number_conserving}};
  std::ostringstream out;
  out << "# " << header.dump() << '\n' << to_triplet_text(model.op);
  return out.str();
}

}  // namespace cavqnd
