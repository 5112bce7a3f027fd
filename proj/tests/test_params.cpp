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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cavqnd/errors.hpp"
#include "cavqnd/io.hpp"
#include "cavqnd/params.hpp"
#include "support.hpp"

namespace cavqnd {
namespace {

using testing::lab_config;

TEST(DeriveRates, CrossKerrAtDeskPoint) {
  const Rates r = testing::rates_with(0.01, 0.05, 0.0);
  // 1e-4 * (8 * 0.05) / (1 - 0.4)
  EXPECT_NEAR(r.gamma, 1e-4 * 0.4 / 0.6, 1e-18);
  EXPECT_NEAR(r.gamma, 6.6667e-5, 1e-9);
  EXPECT_NEAR(r.sigma_inner, 1e-4 * 0.8 / 0.6, 1e-18);
}

TEST(DeriveRates, SqueezingAtEighthOfOmega) {
  const Rates r = testing::rates_with(0.01, 0.0, 0.125);
  EXPECT_NEAR(r.r_squeeze, 0.25 * std::log(2.0), 1e-15);
  EXPECT_NEAR(r.omega_s, std::sqrt(0.5), 1e-15);
  // omega_s = (omega_m - 4 G0) exp(2r)
  EXPECT_NEAR(r.omega_s, 0.5 * std::exp(2.0 * r.r_squeeze), 1e-15);
}

TEST(DeriveRates, UncoupledLimit) {
  const Rates r = testing::rates_with(0.01, 0.0, 0.0);
  EXPECT_EQ(r.lambda1, 1.0);
  EXPECT_EQ(r.nu, 1.0);
  EXPECT_EQ(r.chi, 0.0);
  EXPECT_EQ(r.gamma, 0.0);
}

TEST(DeriveRates, InvariantsOverStableRange) {
  for (double G : {0.001, 0.01, 0.05, 0.1, 0.124}) {
    const Rates r = testing::rates_with(0.02, G, 0.1);
    EXPECT_NEAR(r.lambda1 * r.lambda1, 1.0 - 8.0 * G, 1e-14);
    EXPECT_EQ(r.lambda2, 1.0);
    EXPECT_GE(r.nu, 1.0);
    EXPECT_GT(r.gamma, 0.0);
    EXPECT_GE(r.chi, 0.0);
    EXPECT_NEAR(r.chi, (1.0 - 4.0 * G - r.lambda1) / 2.0, 1e-14);
    EXPECT_NEAR(r.nu - 1.0, r.nu_minus_one, 1e-14);
  }
}

TEST(DeriveRates, StabilityBoundaries) {
  EXPECT_THROW(testing::rates_with(0.01, 0.125, 0.0), StabilityViolation);
  EXPECT_THROW(testing::rates_with(0.01, 0.0, 0.25), StabilityViolation);
  EXPECT_THROW(testing::rates_with(0.01, -0.01, 0.0), SignViolation);
}

TEST(SolveCancellation, KnownValues) {
  EXPECT_EQ(solve_cancellation(0.0), 0.0);
  EXPECT_NEAR(solve_cancellation(1.0 / 12.0), 0.125, 1e-15);
  const double G0 = solve_cancellation(1.0 / 12.0);
  EXPECT_NEAR(sigma_outer(0.01, G0, SignConvention::Paper),
              sigma_inner(0.01, 1.0 / 12.0), 1e-18);
}

TEST(SolveCancellation, SelfPhaseBalancesOverRange) {
  for (double G : {1e-4, 0.01, 0.05, 0.09, 0.12}) {
    const double G0 = solve_cancellation(G);
    const double si = sigma_inner(0.03, G);
    const double so = sigma_outer(0.03, G0, SignConvention::Paper);
    EXPECT_LE(std::abs(so - si), 1e-12 * si) << "G = " << G;
    EXPECT_DOUBLE_EQ(sigma_outer(0.03, G0, SignConvention::Derived), -so);
  }
}

TEST(SolveCancellation, BoundaryRaisesStability) {
  // G -> omega/8 sends G0 -> omega/4.
  EXPECT_THROW(solve_cancellation(0.125), StabilityViolation);
  EXPECT_NO_THROW(solve_cancellation(0.125 - 1e-6));
  EXPECT_LT(solve_cancellation(0.125 - 1e-9), 0.25);
}

TEST(DeriveParams, LabConfigPopulatesBothBlocks) {
  const DerivedParams p = derive_params(lab_config());
  EXPECT_EQ(p.d1, -p.d2);
  EXPECT_EQ(p.d01, -p.d02);
  EXPECT_LT(p.rho, 0.0);
  EXPECT_GT(p.Q_inner, 0.0);
  EXPECT_EQ(p.scaled.omega_m, 1.0);
  EXPECT_NEAR(p.scaled.G_inner, p.si.G_inner / 1e6, 1e-18);
  EXPECT_NEAR(p.scaled.g, p.si.g / 1e6, 1e-20);
  EXPECT_NEAR(p.si.g, p.g0 * p.x_zpf, 1e-12 * p.si.g);
  EXPECT_NEAR(p.g0, 1e15 / 1e-2, 1.0);
  EXPECT_NEAR(p.si.G_inner, p.Q_inner / (2.0 * 1e-12 * 1e6), 1e-9);
  // Lab-frame detunings keep the optical scale; the scaled block uses the
  // rotating-frame override.
  EXPECT_GT(p.si.delta1, 1e14);
  EXPECT_EQ(p.scaled.delta1, 0.0);
  EXPECT_NEAR(p.si.delta2_s, 1e15 + p.g0 * p.d2, 1.0);
}

TEST(DeriveParams, DetuningOverrideReachesScaledBlock) {
  const DerivedParams p = derive_params(lab_config(), {0.3, -0.2});
  EXPECT_EQ(p.scaled.delta1, 0.3);
  EXPECT_EQ(p.scaled.delta2, -0.2);
  EXPECT_EQ(p.scaled.delta2_s, -0.2);
}

TEST(DeriveParams, IsPure) {
  const auto a = to_json(derive_params(lab_config())).dump();
  const auto b = to_json(derive_params(lab_config())).dump();
  EXPECT_EQ(a, b);
}

TEST(DeriveParams, WeakChargesApproachUncoupledLimit) {
  auto c = lab_config();
  c.q1 = 1e-22;
  c.q2 = -1e-22;
  c.q01 = c.q02 = 1e-22;
  c.q00 = c.q22 = -1e-22;
  const DerivedParams p = derive_params(c);
  EXPECT_LT(std::abs(p.d1), 1e-23);
  EXPECT_LT(p.scaled.G_inner, 1e-15);
  EXPECT_NEAR(p.scaled.lambda1, 1.0, 1e-14);
  EXPECT_NEAR(p.scaled.nu, 1.0, 1e-14);
  EXPECT_LT(p.scaled.chi, 1e-28);
  EXPECT_LT(p.scaled.gamma, 1e-20);
}

TEST(DeriveParams, RejectsRepulsiveNearestCharges) {
  auto c = lab_config();
  c.q2 = -c.q2;
  EXPECT_THROW(derive_params(c), SignViolation);
  c = lab_config();
  c.q00 = -c.q00;
  EXPECT_THROW(derive_params(c), SignViolation);
}

TEST(DeriveParams, RejectsAsymmetricOuterCharges) {
  auto c = lab_config();
  c.q22 *= 1.01;
  EXPECT_THROW(derive_params(c), ConfigError);
}

TEST(DeriveParams, RejectsLargeSeparations) {
  auto c = lab_config();
  c.r0 = 2e-4;  // r0 / L = 2e-2
  EXPECT_THROW(derive_params(c), GeometryViolation);
  c = lab_config();
  c.geometry_ratio_max = 1e-3;  // R0 / L = 2e-3
  EXPECT_THROW(derive_params(c), GeometryViolation);
}

TEST(DeriveParams, RejectsStrongInnerSpring) {
  auto c = lab_config();
  c.q1 *= 3.5;  // G/omega_m -> 0.14
  c.q2 *= 3.5;
  EXPECT_THROW(derive_params(c), StabilityViolation);
}

TEST(DeriveParams, RejectsNonPositiveInputs) {
  auto c = lab_config();
  c.mass = 0.0;
  EXPECT_THROW(derive_params(c), ConfigError);
}

TEST(Equilibrium, VanishingChargeGivesOrigin) {
  auto c = lab_config();
  c.q1 = 1e-30;
  c.q2 = -1e-30;
  const auto [x1, x2] = find_equilibrium_numeric(c);
  EXPECT_LT(std::abs(x1), 1e-30);
  EXPECT_LT(std::abs(x2), 1e-30);
}

TEST(Equilibrium, SymmetricUnderMirrorExchange) {
  const auto [x1, x2] = find_equilibrium_numeric(lab_config());
  EXPECT_GT(x1, 0.0);
  EXPECT_LE(std::abs(x1 + x2), 1e-9 * std::abs(x1));
}

TEST(Equilibrium, WeakCouplingMatchesClosedForm) {
  auto c = lab_config();
  c.q1 = 1e-14;
  c.q2 = -1e-14;
  const DerivedParams p = derive_params(c);
  const auto [x1, x2] = find_equilibrium_numeric(c);
  EXPECT_LT(std::abs(x1 - p.d1) / std::abs(p.d1), 1e-3);
  EXPECT_LT(std::abs(x2 - p.d2) / std::abs(p.d2), 1e-3);
}

TEST(Equilibrium, AgreementTightensAsCouplingShrinks) {
  double previous = 1.0;
  for (double q : {4e-14, 2e-14, 1e-14, 5e-15}) {
    auto c = lab_config();
    c.q1 = q;
    c.q2 = -q;
    const double d1 = derive_params(c).d1;
    const double x1 = find_equilibrium_numeric(c).first;
    const double rel = std::abs(x1 - d1) / std::abs(d1);
    EXPECT_LT(rel, previous);
    previous = rel;
  }
}

TEST(Equilibrium, OuterPairMatchesClosedForm) {
  const DerivedParams p = derive_params(lab_config());
  const auto [x01, x02] = find_outer_equilibrium_numeric(lab_config());
  EXPECT_LT(std::abs(x01 - p.d01) / std::abs(p.d01), 1e-3);
  EXPECT_LE(std::abs(x01 + x02), 1e-9 * std::abs(x01));
}

TEST(Equilibrium, PullInIsReported) {
  // k q1 q2 / (m omega^2 r0^3) = -0.09 exceeds the 2/27 barrier of the
  // exact potential even though the expanded spring is still stable.
  auto c = lab_config();
  c.q1 = 1e-13;
  c.q2 = -1e-13;
  EXPECT_THROW(find_equilibrium_numeric(c), ConvergenceFailure);
}

TEST(SignConvention, RoundTripsThroughStrings) {
  for (auto s : {SignConvention::Paper, SignConvention::Derived}) {
    EXPECT_EQ(sign_convention_from_string(to_string(s)), s);
  }
  EXPECT_THROW(sign_convention_from_string("plus"), ConfigError);
}

}  // namespace
}  // namespace cavqnd
