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
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cavqnd/errors.hpp"
#include "cavqnd/qnd.hpp"
#include "support.hpp"

namespace cavqnd {
namespace {

using std::numbers::pi;

ProtocolConfig ideal_config(const Rates& r, int n_true, Backend b) {
  ProtocolConfig c;
  c.n_true = n_true;
  c.backend = b;
  c.T = recommended_interaction_time(0.0, r.gamma, 5);
  c.compute_fidelity = false;
  return c;
}

TEST(BeamSplitter, PaperFirstSplitterMap) {
  const cplx alpha(1.3, -0.4);
  const auto [o2, o3] = beam_splitter(0.0, alpha);
  EXPECT_LT(std::abs(o2 - cplx(0.0, 1.0) * alpha / std::sqrt(2.0)), 1e-15);
  EXPECT_LT(std::abs(o3 - alpha / std::sqrt(2.0)), 1e-15);
  const auto [z2, z3] = beam_splitter(0.0, 0.0);
  EXPECT_EQ(z2, 0.0);
  EXPECT_EQ(z3, 0.0);
}

TEST(BeamSplitter, TwiceSwapsArms) {
  const cplx alpha(2.0, 0.5);
  const auto [a, b] = beam_splitter(0.0, alpha);
  const auto [c, d] = beam_splitter(a, b);
  EXPECT_NEAR(std::abs(c), std::abs(alpha), 1e-15);
  EXPECT_NEAR(std::abs(d), 0.0, 1e-15);
}

TEST(BeamSplitter, PreservesPhotonNumber) {
  for (auto [x, y] : {std::pair{cplx(1, 2), cplx(-0.5, 0.1)},
                      {cplx(0, 3), cplx(2, 2)}}) {
    const auto [u, v] = beam_splitter(x, y);
    EXPECT_NEAR(std::norm(u) + std::norm(v), std::norm(x) + std::norm(y),
                1e-14);
  }
}

TEST(BeamSplitter, FockUnitaryMatchesAmplitudeMap) {
  const cplx alpha(2.0, 0.0);
  const ModeLayout L({{"a2", 30}, {"a3", 30}});
  const auto psi = StateVector::product(
      L, {coherent_amplitudes(0.0, 30), coherent_amplitudes(alpha, 30)});
  const auto out = apply_beam_splitter(psi, "a2", "a3");
  EXPECT_NEAR(out.norm(), 1.0, 1e-10);
  EXPECT_NEAR(out.mean_occupation("a2") + out.mean_occupation("a3"),
              psi.mean_occupation("a3"), 1e-10);
  const auto [e2, e3] = beam_splitter(0.0, alpha);
  EXPECT_LT(std::abs(out.expectation(annihilator(L, "a2")) - e2), 1e-8);
  EXPECT_LT(std::abs(out.expectation(annihilator(L, "a3")) - e3), 1e-8);
}

TEST(BeamSplitter, FockRejectsBadArms) {
  const ModeLayout L({{"a2", 5}, {"a3", 6}});
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(30);
  v(0) = 1.0;
  EXPECT_THROW(apply_beam_splitter(StateVector(L, v), "a2", "a3"),
               DimensionMismatch);
  // All weight on |4, 4>: eight photons cannot fit in two dim-5 arms once
  // mixed.
  const ModeLayout M({{"a2", 5}, {"a3", 5}});
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(25);
  w(24) = 1.0;
  EXPECT_THROW(apply_beam_splitter(StateVector(M, w), "a2", "a3"),
               TruncationTooSmall);
}

TEST(Analytic, NoInteractionGivesFullSignal) {
  const Rates r = testing::desk_rates();
  auto c = ideal_config(r, 0, Backend::Analytic);
  const auto rec = run_protocol(c, r);
  EXPECT_EQ(rec.theta, 0.0);
  EXPECT_NEAR(rec.expect_D, 4.0, 1e-12);
  EXPECT_EQ(rec.n_est, 0);
}

TEST(Analytic, QuadraturePointGivesZero) {
  const Rates r = testing::desk_rates();
  ProtocolConfig c;
  c.n_true = 3;
  c.n_search_max = 3;
  c.T = pi / (2.0 * 3.0 * r.gamma);
  const auto rec = run_protocol(c, r);
  EXPECT_NEAR(rec.expect_D, 0.0, 1e-12);
  EXPECT_EQ(rec.n_est, 3);
}

TEST(Analytic, PhaseFollowsCrossKerr) {
  const Rates r = testing::rates_with(0.01, 0.05, 0.0);
  ProtocolConfig c;
  c.delta2 = 1e-5;
  c.T = recommended_interaction_time(c.delta2, r.gamma, 5);
  for (int n = 0; n <= 5; ++n) {
    c.n_true = n;
    const auto rec = run_protocol(c, r);
    EXPECT_EQ(rec.theta, -c.T * (c.delta2 + r.gamma * n));
    EXPECT_NEAR(rec.expect_D, 4.0 * std::cos(rec.theta), 1e-12);
    EXPECT_LE(std::abs(rec.expect_D), 4.0 + 1e-9);
    EXPECT_EQ(rec.n_est, n);
    EXPECT_FALSE(rec.ambiguous);
  }
}

TEST(Analytic, OnlyIdealHamiltonian) {
  const Rates r = testing::desk_rates();
  auto c = ideal_config(r, 1, Backend::Analytic);
  c.hamiltonian = Variant::EffectiveSimplified;
  EXPECT_THROW(run_protocol(c, r), UnsupportedBackend);
}

TEST(Fock, MatchesAnalyticAtThreePhotons) {
  const Rates r = testing::desk_rates();
  const auto fock = run_protocol(ideal_config(r, 3, Backend::Fock), r);
  const auto ana = run_protocol(ideal_config(r, 3, Backend::Analytic), r);
  EXPECT_LT(std::abs(fock.expect_D - ana.expect_D), 1e-6 * 4.0);
  EXPECT_EQ(fock.n_est, 3);
}

TEST(Fock, BackendsAgreeOverAmplitudes) {
  const Rates r = testing::desk_rates();
  for (double a : {1.0, 2.0, 3.0}) {
    for (int n = 0; n <= 5; ++n) {
      auto fc = ideal_config(r, n, Backend::Fock);
      auto ac = ideal_config(r, n, Backend::Analytic);
      fc.alpha = ac.alpha = a;
      const double df = run_protocol(fc, r).expect_D;
      const double da = run_protocol(ac, r).expect_D;
      EXPECT_LT(std::abs(df - da), 1e-6 * a * a) << "alpha " << a << " n " << n;
      EXPECT_LE(std::abs(df), a * a + 1e-9);
    }
  }
}

TEST(Fock, SignalNumberSurvivesEveryEffectiveVariant) {
  const Rates r = testing::desk_rates();
  for (auto v : {Variant::EffectiveIdeal, Variant::EffectiveSimplified,
                 Variant::EffectiveCombined}) {
    auto c = ideal_config(r, 4, Backend::Fock);
    c.hamiltonian = v;
    EXPECT_NEAR(run_protocol(c, r).signal_photons_after, 4.0, 1e-10)
        << to_string(v);
  }
}

TEST(Fock, SignalNumberSurvivesFullInner) {
  const Rates r = testing::desk_rates();
  ProtocolConfig c;
  c.backend = Backend::Fock;
  c.hamiltonian = Variant::FullInner;
  c.alpha = 1.0;
  c.probe_dim = 17;
  c.mech_dim = 4;
  c.T = 10.0;
  c.n_true = 2;
  c.compute_fidelity = false;
  EXPECT_NEAR(run_protocol(c, r).signal_photons_after, 2.0, 1e-10);
}

TEST(Fock, ProbeTruncationIsChecked) {
  const Rates r = testing::desk_rates();
  auto c = ideal_config(r, 1, Backend::Fock);
  c.alpha = 4.0;  // needs 50
  try {
    run_protocol(c, r);
    FAIL() << "expected TruncationTooSmall";
  } catch (const TruncationTooSmall& e) {
    EXPECT_NE(std::string(e.what()).find("50"), std::string::npos);
  }
}

TEST(Fock, IdealProbeStaysCoherent) {
  const Rates r = testing::desk_rates();
  auto c = ideal_config(r, 2, Backend::Fock);
  c.compute_fidelity = true;
  const auto rec = run_protocol(c, r);
  ASSERT_TRUE(rec.fidelity_probe.has_value());
  EXPECT_GT(*rec.fidelity_probe, 1.0 - 1e-8);
}

TEST(Fock, SelfPhaseDegradesProbe) {
  // Frozen from an independent overlap computation: probe fidelity with
  // the best coherent state at sigma T = 0, 0.1, 0.5, pi/2.
  const Rates r = testing::desk_rates();
  auto c = ideal_config(r, 3, Backend::Fock);
  c.hamiltonian = Variant::EffectiveSimplified;
  c.compute_fidelity = true;
  const std::vector<double> sigma_T{0.0, 0.1, 0.5, pi / 2};
  const std::vector<double> expected{1.0, 0.9355348507, 0.5592492120,
                                     0.5015311750};
  double previous = 2.0;
  std::vector<double> bias;
  for (std::size_t i = 0; i < sigma_T.size(); ++i) {
    c.sigma_scale = sigma_T[i] / (r.sigma_inner * c.T);
    const auto rec = run_protocol(c, r);
    ASSERT_TRUE(rec.fidelity_probe.has_value());
    EXPECT_NEAR(*rec.fidelity_probe, expected[i], 1e-6);
    EXPECT_LT(*rec.fidelity_probe, previous);
    previous = *rec.fidelity_probe;
    bias.push_back(rec.bias);
  }
  EXPECT_LT(std::abs(bias[0]), 1e-9);
  EXPECT_GT(std::abs(bias[3]), 1e-3);
  EXPECT_LT(previous, 1.0 - 1e-3);
}

TEST(Fock, ZeroSigmaScaleIsIdealExactly) {
  const Rates r = testing::desk_rates();
  auto ideal = ideal_config(r, 3, Backend::Fock);
  auto simplified = ideal;
  simplified.hamiltonian = Variant::EffectiveSimplified;
  simplified.sigma_scale = 0.0;
  const auto a = run_protocol(ideal, r);
  const auto b = run_protocol(simplified, r);
  EXPECT_EQ(a.expect_D, b.expect_D);
  EXPECT_EQ(a.n_est_real, b.n_est_real);
}

TEST(Window, RecommendedTimeAndAliasing) {
  const double gamma = 1e-4;
  const double T = recommended_interaction_time(0.0, gamma, 5);
  EXPECT_NEAR(T * gamma * 5, pi / 2, 1e-12);
  EXPECT_NO_THROW(check_phase_window(T, 0.0, gamma, 5));
  EXPECT_NO_THROW(check_phase_window(2.0 * T, 0.0, gamma, 5));
  EXPECT_THROW(check_phase_window(2.5 * T, 0.0, gamma, 5), PhaseAliasing);
  EXPECT_THROW(check_phase_window(T, -1e-3, gamma, 5), PhaseAliasing);
}

TEST(Window, ProtocolRefusesAliasingUnlessAllowed) {
  const Rates r = testing::desk_rates();
  auto c = ideal_config(r, 1, Backend::Analytic);
  c.T *= 3.0;
  EXPECT_THROW(run_protocol(c, r), PhaseAliasing);
  c.allow_aliasing = true;
  EXPECT_NO_THROW(run_protocol(c, r));
}

TEST(Estimate, FullSignalMeansNoPhotons) {
  const auto e = estimate_n(4.0, 2.0, 100.0, 0.0, 1e-3);
  EXPECT_EQ(e.n_est, 0);
  EXPECT_EQ(e.n_est_real, 0.0);
}

TEST(Estimate, RoundTripThroughProtocol) {
  const Rates r = testing::desk_rates();
  for (int k = 0; k <= 5; ++k) {
    const auto rec = run_protocol(ideal_config(r, k, Backend::Analytic), r);
    const auto e = estimate_n(rec.expect_D, 2.0, rec.config.T, 0.0, r.gamma);
    EXPECT_EQ(e.n_est, k);
    EXPECT_LT(rec.residual, 1e-9);
  }
}

TEST(Estimate, FirstOrderSensitivity) {
  const Rates r = testing::desk_rates();
  const double T = recommended_interaction_time(0.0, r.gamma, 5);
  for (int n = 1; n <= 5; ++n) {
    const double theta = T * r.gamma * n;
    const double D = 4.0 * std::cos(theta) + 1e-3 * 4.0;
    const auto e = estimate_n(D, 2.0, T, 0.0, r.gamma);
    const double bound = 1e-3 / (T * r.gamma * std::sin(theta));
    EXPECT_LE(std::abs(e.n_est_real - n), bound * 1.01) << n;
    EXPECT_GE(std::abs(e.n_est_real - n), bound * 0.99) << n;
  }
}

TEST(Estimate, RejectsImpossibleSignal) {
  EXPECT_THROW(estimate_n(4.0 * (1 + 1e-6), 2.0, 1.0, 0.0, 0.1), OutOfRange);
  EXPECT_NO_THROW(estimate_n(4.0 * (1 + 1e-12), 2.0, 1.0, 0.0, 0.1));
  EXPECT_THROW(estimate_n(0.0, 2.0, 1.0, 0.0, 0.0), OutOfRange);
  EXPECT_THROW(estimate_n(0.0, 2.0, 100.0, 0.0, 0.1), PhaseAliasing);
}

TEST(Estimate, FlagsAmbiguity) {
  // Phase 2 pi / 4 per photon: n = 0 and n = 4 give the same signal.
  const double gamma = 0.1, T = 2.0 * pi / (4.0 * gamma);
  const auto e = estimate_n(4.0, 2.0, T, 0.0, gamma, 5, 1e-6, false);
  EXPECT_TRUE(e.ambiguous);
}

TEST(Shots, SampledSignalIsReproducible) {
  const Rates r = testing::desk_rates();
  auto c = ideal_config(r, 2, Backend::Fock);
  c.shots = 4000;
  c.seed = 7;
  const auto a = run_protocol(c, r);
  const auto b = run_protocol(c, r);
  EXPECT_EQ(a.expect_D, b.expect_D);
  const double exact = 4.0 * std::cos(a.theta);
  EXPECT_NEAR(a.expect_D, exact, 0.25);  // ~6 standard errors
  auto ac = ideal_config(r, 2, Backend::Analytic);
  ac.shots = 4000;
  EXPECT_NEAR(run_protocol(ac, r).expect_D, exact, 0.25);
}

TEST(Sweep, ThetaDecreasesWithPhotonNumber) {
  const Rates r = testing::desk_rates();
  const auto recs = sweep(ideal_config(r, 0, Backend::Analytic), r,
                          SweepAxis::NTrue, {0, 1, 2, 3, 4, 5});
  ASSERT_EQ(recs.size(), 6u);
  for (std::size_t i = 1; i < recs.size(); ++i) {
    EXPECT_LT(recs[i].theta, recs[i - 1].theta);
    EXPECT_EQ(recs[i].n_est, static_cast<long>(i));
  }
}

TEST(Sweep, ZeroSigmaScaleHasNoBias) {
  const Rates r = testing::desk_rates();
  auto c = ideal_config(r, 3, Backend::Fock);
  c.hamiltonian = Variant::EffectiveSimplified;
  const auto recs = sweep(c, r, SweepAxis::SigmaScale, {0.0, 0.5, 1.0});
  EXPECT_LT(std::abs(recs[0].bias), 1e-9);
  for (const auto& rec : recs) EXPECT_EQ(rec.status, "ok");
}

TEST(Sweep, ErrorsAreRecordedNotThrown) {
  const Rates r = testing::desk_rates();
  auto c = ideal_config(r, 1, Backend::Analytic);
  const auto recs =
      sweep(c, r, SweepAxis::T, {c.T, 3.0 * c.T}, linalg::Execution::Serial);
  EXPECT_EQ(recs[0].status, "ok");
  EXPECT_EQ(recs[1].status.rfind("PhaseAliasing", 0), 0u);
  EXPECT_TRUE(std::isnan(recs[1].expect_D));
}

TEST(Sweep, ParallelMatchesSerial) {
  const Rates r = testing::desk_rates();
  auto c = ideal_config(r, 2, Backend::Fock);
  c.shots = 100;
  const std::vector<double> grid{1.0, 1.5, 2.0, 2.5};
  const auto s = sweep(c, r, SweepAxis::Alpha, grid, linalg::Execution::Serial);
  const auto p = sweep(c, r, SweepAxis::Alpha, grid, linalg::Execution::Parallel);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(s[i].config.alpha, cplx(grid[i], 0.0));
    EXPECT_EQ(s[i].expect_D, p[i].expect_D);
    EXPECT_EQ(s[i].config.seed, c.seed + i);
  }
}

TEST(Records, CsvSchemaAndJson) {
  const Rates r = testing::desk_rates();
  const auto recs = sweep(ideal_config(r, 0, Backend::Analytic), r,
                          SweepAxis::NTrue, {0, 1});
  const auto csv = records_csv(recs);
  EXPECT_EQ(csv.rfind("# " + std::string(kRecordSchema), 0), 0u);
  EXPECT_NE(csv.find("bias"), std::string::npos);
  const auto j = to_json(recs[1]);
  EXPECT_EQ(j["n_est"], 1);
  EXPECT_TRUE(j["fidelity_probe"].is_null());
  EXPECT_EQ(j["status"], "ok");
}

TEST(Names, RoundTrip) {
  for (auto b : {Backend::Analytic, Backend::Fock}) {
    EXPECT_EQ(backend_from_string(to_string(b)), b);
  }
  for (auto a : {SweepAxis::NTrue, SweepAxis::Alpha, SweepAxis::T,
                 SweepAxis::SigmaScale}) {
    EXPECT_EQ(sweep_axis_from_string(to_string(a)), a);
  }
  EXPECT_THROW(backend_from_string("photonic"), ConfigError);
}

}  // namespace
}  // namespace cavqnd
