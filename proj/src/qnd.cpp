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

#include "cavqnd/qnd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cavqnd/errors.hpp"
#include "cavqnd/io.hpp"

namespace cavqnd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kWindowSlack = 1e-12;
constexpr double kLostWeight = 1e-12;

// exp(i pi/4 K) on the N-photon block, K the hopping matrix with entries
// sqrt((k+1)(N-k)) between |k, N-k> and |k+1, N-k-1>.
Eigen::MatrixXcd splitter_block(int N) {
  const int n = N + 1;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 0; k + 1 < n; ++k) off(k) = std::sqrt(double(k + 1) * (N - k));
  if (n == 1) return Eigen::MatrixXcd::Identity(1, 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  const Eigen::MatrixXd& V = es.eigenvectors();
  Eigen::VectorXcd phase(n);
  for (int k = 0; k < n; ++k) {
    phase(k) = std::exp(cplx(0.0, kPi / 4.0 * es.eigenvalues()(k)));
  }
  return V.cast<cplx>() * phase.asDiagonal() * V.transpose().cast<cplx>();
}

// Coherent amplitudes without the truncation-adequacy guard, for probing
// overlaps anywhere in phase space.
Eigen::VectorXcd raw_coherent(cplx beta, int dim) {
  Eigen::VectorXcd c(dim);
  cplx term = std::exp(-0.5 * std::norm(beta));
  for (int k = 0; k < dim; ++k) {
    c(k) = term;
    term *= beta / std::sqrt(double(k + 1));
  }
  return c;
}

// max over beta of <beta|rho|beta>: coarse polar grid, then pattern search.
double max_coherent_overlap(const Eigen::MatrixXcd& rho) {
  const int dim = static_cast<int>(rho.rows());
  auto q = [&](double re, double im) {
    const auto c = raw_coherent(cplx(re, im), dim);
    return c.dot(rho * c).real();
  };
  double mean_n = 0.0;
  for (int k = 0; k < dim; ++k) mean_n += k * rho(k, k).real();
  const double radius = 2.0 * std::sqrt(std::max(mean_n, 1.0)) + 1.0;

  constexpr int kRadial = 40, kAngular = 72;
  double best = q(0.0, 0.0), bre = 0.0, bim = 0.0;
  for (int i = 1; i <= kRadial; ++i) {
    const double r = radius * i / kRadial;
    for (int j = 0; j < kAngular; ++j) {
      const double phi = 2.0 * kPi * j / kAngular;
      const double re = r * std::cos(phi), im = r * std::sin(phi);
      const double v = q(re, im);
      if (v > best) best = v, bre = re, bim = im;
    }
  }
  for (double h = radius / kRadial; h > 1e-9; h *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (auto [dr, di] : {std::pair{h, 0.0}, {-h, 0.0}, {0.0, h}, {0.0, -h}}) {
        const double v = q(bre + dr, bim + di);
        if (v > best) {
          best = v, bre += dr, bim += di;
          moved = true;
        }
      }
    }
  }
  return std::min(best, 1.0);
}

Rates protocol_rates(const Rates& rates, double delta2) {
  Rates p = rates;
  p.delta1 = p.delta1_s = 0.0;  // only a global phase on the signal Fock state
  p.delta2 = p.delta2_s = delta2;
  return p;
}

double sample_difference(double mean2, double mean3, int shots,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::poisson_distribution<long> d2(mean2), d3(mean3);
  double sum = 0.0;
  for (int s = 0; s < shots; ++s) {
    sum += double(mean2 > 0.0 ? d2(rng) : 0) - double(mean3 > 0.0 ? d3(rng) : 0);
  }
  return sum / shots;
}

double sample_difference(const StateVector& psi, int shots, std::uint64_t seed) {
  const auto& L = psi.layout();
  const auto p2 = L.position("a2"), p3 = L.position(kArm3);
  std::vector<double> weights(L.total_dim());
  std::vector<int> diff(L.total_dim());
  for (std::size_t k = 0; k < L.total_dim(); ++k) {
    weights[k] = std::norm(psi.amplitudes()(static_cast<Eigen::Index>(k)));
    diff[k] = L.occupation(k, p2) - L.occupation(k, p3);
  }
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  double sum = 0.0;
  for (int s = 0; s < shots; ++s) sum += diff[pick(rng)];
  return sum / shots;
}

ModeLayout protocol_layout(const ProtocolConfig& cfg) {
  std::vector<Mode> modes{{"a1", std::max(cfg.n_true + 2, 2)},
                          {"a2", cfg.probe_dim}};
  if (!is_effective(cfg.hamiltonian)) {
    const auto mech = sector_layout(cfg.hamiltonian, cfg.mech_dim);
    for (const auto& m : mech.modes()) modes.push_back(m);
  }
  modes.push_back({std::string(kArm3), cfg.probe_dim});
  return ModeLayout(std::move(modes));
}

}  // namespace

std::string_view to_string(Backend b) {
  return b == Backend::Analytic ? "analytic" : "fock";
}

Backend backend_from_string(std::string_view s) {
  if (s == "analytic") return Backend::Analytic;
  if (s == "fock") return Backend::Fock;
  throw ConfigError("unknown backend '" + std::string(s) +
                    "' (expected analytic or fock)");
}

std::pair<cplx, cplx> beam_splitter(cplx amp2, cplx amp3) {
  const cplx i(0.0, 1.0);
  return {(amp2 + i * amp3) * M_SQRT1_2, (i * amp2 + amp3) * M_SQRT1_2};
}

StateVector apply_beam_splitter(const StateVector& psi, std::string_view arm2,
                                std::string_view arm3) {
  const auto& L = psi.layout();
  const auto p2 = L.position(arm2), p3 = L.position(arm3);
  const int dim = L.modes()[p2].dim;
  if (L.modes()[p3].dim != dim) {
    throw DimensionMismatch("beam splitter: arms '" + std::string(arm2) +
                            "' and '" + std::string(arm3) +
                            "' must share one dimension");
  }
  const auto s2 = L.stride(p2), s3 = L.stride(p3);
  const auto& in = psi.amplitudes();

  double lost = 0.0;
  for (std::size_t f = 0; f < L.total_dim(); ++f) {
    if (L.occupation(f, p2) + L.occupation(f, p3) >= dim) {
      lost += std::norm(in(static_cast<Eigen::Index>(f)));
    }
  }
  if (lost > kLostWeight) {
    std::ostringstream msg;
    msg << "beam splitter: weight " << lost << " beyond the arm truncation "
        << dim << "; increase probe_dim";
    throw TruncationTooSmall(msg.str());
  }

  std::vector<Eigen::MatrixXcd> blocks;
  blocks.reserve(static_cast<std::size_t>(dim));
  for (int N = 0; N < dim; ++N) blocks.push_back(splitter_block(N));

  Eigen::VectorXcd out = in;
  Eigen::VectorXcd x;
  for (std::size_t base = 0; base < L.total_dim(); ++base) {
    if (L.occupation(base, p2) != 0 || L.occupation(base, p3) != 0) continue;
    for (int N = 0; N < dim; ++N) {
      x.resize(N + 1);
      for (int k = 0; k <= N; ++k) {
        x(k) = in(static_cast<Eigen::Index>(base + k * s2 + (N - k) * s3));
      }
      if (x.squaredNorm() == 0.0) continue;
      const Eigen::VectorXcd y = blocks[static_cast<std::size_t>(N)] * x;
      for (int k = 0; k <= N; ++k) {
        out(static_cast<Eigen::Index>(base + k * s2 + (N - k) * s3)) = y(k);
      }
    }
  }
  return StateVector::normalized(L, std::move(out));
}

double recommended_interaction_time(double delta2, double gamma,
                                    int n_search_max) {
  const double top = delta2 + gamma * n_search_max;
  if (!(top > 0.0)) {
    throw OutOfRange("interaction time: delta2 + gamma n_max must be positive");
  }
  return kPi / (2.0 * top);
}

void check_phase_window(double T, double delta2, double gamma, int n_max) {
  for (int n = 0; n <= n_max; ++n) {
    const double phase = T * (delta2 + gamma * n);
    if (phase < -kWindowSlack || phase > kPi * (1.0 + kWindowSlack)) {
      std::ostringstream msg;
      msg << "phase window violated: T (delta2 + gamma n) = " << phase
          << " at n = " << n << " lies outside [0, pi]";
      throw PhaseAliasing(msg.str());
    }
  }
}

Estimate estimate_n(double expect_D, cplx alpha, double T, double delta2,
                    double gamma, int n_search_max, double resolution,
                    bool check_window) {
  const double scale = std::norm(alpha);
  if (!(scale > 0.0)) throw OutOfRange("estimate_n: probe amplitude is zero");
  if (!(gamma > 0.0)) throw OutOfRange("estimate_n: gamma must be positive");
  if (!(std::abs(expect_D) <= scale * (1.0 + 1e-9))) {
    std::ostringstream msg;
    msg << "estimate_n: |D| = " << std::abs(expect_D) << " exceeds |alpha|^2 = "
        << scale;
    throw OutOfRange(msg.str());
  }
  if (check_window) check_phase_window(T, delta2, gamma, n_search_max);

  const double c = std::clamp(expect_D / scale, -1.0, 1.0);
  Estimate e;
  e.n_est_real = (std::acos(c) / T - delta2) / gamma;
  e.n_est = std::lround(e.n_est_real);
  const double d_est = scale * std::cos(T * (delta2 + gamma * e.n_est));
  for (int m = 0; m <= n_search_max; ++m) {
    if (m == e.n_est) continue;
    const double d_m = scale * std::cos(T * (delta2 + gamma * m));
    if (std::abs(d_m - d_est) < resolution * scale) e.ambiguous = true;
  }
  return e;
}

QndRunRecord run_protocol(const ProtocolConfig& cfg, const Rates& rates) {
  if (cfg.n_true < 0) throw OutOfRange("run_protocol: n_true must be >= 0");
  if (!(cfg.T >= 0.0)) throw OutOfRange("run_protocol: T must be >= 0");
  if (cfg.shots < 0) throw OutOfRange("run_protocol: shots must be >= 0");

  QndRunRecord r;
  r.config = cfg;
  r.gamma = rates.gamma;
  const int search_max = std::max(cfg.n_search_max, cfg.n_true);
  if (!cfg.allow_aliasing) {
    check_phase_window(cfg.T, cfg.delta2, rates.gamma, search_max);
  }
  r.theta = -cfg.T * (cfg.delta2 + rates.gamma * cfg.n_true);
  const double scale = std::norm(cfg.alpha);

  if (cfg.backend == Backend::Analytic) {
    if (cfg.hamiltonian != Variant::EffectiveIdeal) {
      throw UnsupportedBackend(
          "analytic backend propagates coherent amplitudes and needs the "
          "ideal Hamiltonian; use the fock backend for '" +
          std::string(to_string(cfg.hamiltonian)) + "'");
    }
    auto [a2, a3] = beam_splitter(0.0, cfg.alpha);
    a2 *= std::exp(cplx(0.0, r.theta));
    const auto [o2, o3] = beam_splitter(a2, a3);
    r.expect_D = cfg.shots > 0
                     ? sample_difference(std::norm(o2), std::norm(o3),
                                         cfg.shots, cfg.seed)
                     : std::norm(o2) - std::norm(o3);
    r.signal_photons_after = cfg.n_true;
  } else {
    const auto layout = protocol_layout(cfg);
    std::vector<Eigen::VectorXcd> factors;
    for (const auto& m : layout.modes()) {
      Eigen::VectorXcd f = Eigen::VectorXcd::Zero(m.dim);
      if (m.label == "a1") {
        f(cfg.n_true) = 1.0;
      } else if (m.label == kArm3) {
        f = coherent_amplitudes(cfg.alpha, m.dim);
      } else {
        f(0) = 1.0;
      }
      factors.push_back(std::move(f));
    }
    auto psi = StateVector::product(layout, factors);
    psi = apply_beam_splitter(psi, "a2", kArm3);

    const auto model = build(cfg.hamiltonian, protocol_rates(rates, cfg.delta2),
                             layout, cfg.sigma_scale);
    psi = evolve(model.op, psi, cfg.T);
    if (cfg.compute_fidelity) {
      r.fidelity_probe = max_coherent_overlap(psi.reduced_density("a2"));
    }
    psi = apply_beam_splitter(psi, "a2", kArm3);
    r.expect_D = cfg.shots > 0 ? sample_difference(psi, cfg.shots, cfg.seed)
                               : psi.mean_occupation("a2") -
                                     psi.mean_occupation(kArm3);
    r.signal_photons_after = psi.mean_occupation("a1");
  }

  // Sampled D may stray past the physical bound; the estimate then sits on
  // the branch edge.
  const double d_for_estimate =
      cfg.shots > 0 ? std::clamp(r.expect_D, -scale, scale) : r.expect_D;
  const auto e = estimate_n(d_for_estimate, cfg.alpha, cfg.T, cfg.delta2,
                            rates.gamma, search_max, cfg.resolution,
                            !cfg.allow_aliasing);
  r.n_est_real = e.n_est_real;
  r.n_est = e.n_est;
  r.ambiguous = e.ambiguous;
  r.residual = std::abs(e.n_est_real - double(e.n_est));
  r.bias = e.n_est_real - cfg.n_true;
  return r;
}

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::NTrue: return "n_true";
    case SweepAxis::Alpha: return "alpha";
    case SweepAxis::T: return "T";
    case SweepAxis::SigmaScale: return "sigma_scale";
  }
  return "unknown";
}

SweepAxis sweep_axis_from_string(std::string_view s) {
  for (auto a : {SweepAxis::NTrue, SweepAxis::Alpha, SweepAxis::T,
                 SweepAxis::SigmaScale}) {
    if (s == to_string(a)) return a;
  }
  throw ConfigError("unknown sweep axis '" + std::string(s) +
                    "' (expected n_true, alpha, T or sigma_scale)");
}

std::vector<QndRunRecord> sweep(const ProtocolConfig& base, const Rates& rates,
                                SweepAxis axis, const std::vector<double>& grid,
                                linalg::Execution exec) {
  const int count = static_cast<int>(grid.size());
  std::vector<QndRunRecord> out(grid.size());
  auto run = [&](int i) {
    ProtocolConfig cfg = base;
    const double x = grid[static_cast<std::size_t>(i)];
    switch (axis) {
      case SweepAxis::NTrue: cfg.n_true = static_cast<int>(std::lround(x)); break;
      case SweepAxis::Alpha: cfg.alpha = cplx(x, 0.0); break;
      case SweepAxis::T: cfg.T = x; break;
      case SweepAxis::SigmaScale: cfg.sigma_scale = x; break;
    }
    cfg.seed = base.seed + static_cast<std::uint64_t>(i);
    auto& rec = out[static_cast<std::size_t>(i)];
    try {
      rec = run_protocol(cfg, rates);
    } catch (const std::exception& e) {
      constexpr double nan = std::numeric_limits<double>::quiet_NaN();
      rec = QndRunRecord{};
      rec.config = cfg;
      rec.gamma = rates.gamma;
      rec.theta = -cfg.T * (cfg.delta2 + rates.gamma * cfg.n_true);
      rec.expect_D = rec.n_est_real = rec.residual = rec.bias = nan;
      rec.signal_photons_after = nan;
      rec.n_est = -1;
      rec.status = std::string(error_kind(e)) + ": " + e.what();
    }
  };
  if (exec == linalg::Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) run(i);
  } else {
    for (int i = 0; i < count; ++i) run(i);
  }
  return out;
}

nlohmann::json to_json(const QndRunRecord& r) {
  const auto& c = r.config;
  nlohmann::json j{{"n_true", c.n_true},
                   {"alpha_re", c.alpha.real()},
                   {"alpha_im", c.alpha.imag()},
                   {"T", c.T},
                   {"delta2", c.delta2},
                   {"hamiltonian", std::string(to_string(c.hamiltonian))},
                   {"backend", std::string(to_string(c.backend))},
                   {"sigma_scale", c.sigma_scale},
                   {"shots", c.shots},
                   {"gamma", r.gamma},
                   {"theta", r.theta},
                   {"expect_D", r.expect_D},
                   {"n_est_real", r.n_est_real},
                   {"n_est", r.n_est},
                   {"residual", r.residual},
                   {"bias", r.bias},
                   {"ambiguous", r.ambiguous},
                   {"signal_photons_after", r.signal_photons_after},
                   {"status", r.status}};
  j["fidelity_probe"] =
      r.fidelity_probe ? nlohmann::json(*r.fidelity_probe) : nlohmann::json();
  return j;
}

std::string records_csv(const std::vector<QndRunRecord>& records) {
  std::ostringstream out;
  out << "# " << kRecordSchema << '\n'
      << "n_true,alpha_re,alpha_im,T,delta2,hamiltonian,backend,sigma_scale,"
         "gamma,theta,expect_D,n_est_real,n_est,residual,bias,ambiguous,"
         "fidelity_probe,signal_photons_after,status\n";
  for (const auto& r : records) {
    const auto& c = r.config;
    std::string status = r.status;
    std::replace(status.begin(), status.end(), '"', '\'');
    out << c.n_true << ',' << format_double(c.alpha.real()) << ','
        << format_double(c.alpha.imag()) << ',' << format_double(c.T) << ','
        << format_double(c.delta2) << ',' << to_string(c.hamiltonian) << ','
        << to_string(c.backend) << ',' << format_double(c.sigma_scale) << ','
        << format_double(r.gamma) << ',' << format_double(r.theta) << ','
        << format_double(r.expect_D) << ',' << format_double(r.n_est_real)
        << ',' << r.n_est << ',' << format_double(r.residual) << ','
        << format_double(r.bias) << ',' << (r.ambiguous ? 1 : 0) << ','
        << (r.fidelity_probe ? format_double(*r.fidelity_probe) : "") << ','
        << format_double(r.signal_photons_after) << ",\"" << status << "\"\n";
  }
  return out.str();
}

}  // namespace cavqnd
