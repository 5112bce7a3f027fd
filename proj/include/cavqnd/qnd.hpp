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

// Photon counting through a cross-Kerr phase in a Mach-Zehnder interferometer.
//
// Mode 1 holds the signal (a Fock state |n>), modes 2 and 3 are the
// interferometer arms. The probe enters arm 3 as a coherent state, the first
// splitter spreads it over both arms, arm 2 picks up a phase that depends on
// n during the interaction time T, and the second splitter converts that
// phase into a detector difference D = N2 - N3 = |alpha|^2 cos(theta).

#ifndef CAVQND_QND_HPP
#define CAVQND_QND_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cavqnd/fock.hpp"
#include "cavqnd/linalg.hpp"
#include "cavqnd/model.hpp"

namespace cavqnd {

inline constexpr std::string_view kRecordSchema = "cavqnd-qnd-records v1";
inline constexpr std::string_view kArm3 = "a3";

enum class Backend { Analytic, Fock };
std::string_view to_string(Backend b);
Backend backend_from_string(std::string_view s);

/// Symmetric 50/50 splitter with i on reflection:
/// (b2, b3) -> ((b2 + i b3)/sqrt2, (i b2 + b3)/sqrt2).
std::pair<cplx, cplx> beam_splitter(cplx amp2, cplx amp3);

/// The same splitter as a two-mode unitary exp(i pi/4 (a2^dag a3 + a3^dag a2))
/// on a state whose two arm modes share one dimension. Throws
/// DimensionMismatch for unequal dims and TruncationTooSmall when the state
/// has weight on total arm occupations the truncation cannot hold.
StateVector apply_beam_splitter(const StateVector& psi, std::string_view arm2,
                                std::string_view arm3);

struct ProtocolConfig {
  int n_true = 0;
  cplx alpha{2.0, 0.0};
  double T = 0.0;
  double delta2 = 0.0;  // probe detuning, rotating frame
  Variant hamiltonian = Variant::EffectiveIdeal;
  Backend backend = Backend::Analytic;
  int probe_dim = 40;   // arms 2 and 3
  int mech_dim = 4;     // mechanical modes of the full variants
  double sigma_scale = 1.0;
  int n_search_max = 5;
  bool allow_aliasing = false;
  /// Two integers closer than this in predicted D (fraction of |alpha|^2)
  /// are flagged as ambiguous.
  double resolution = 1e-6;
  /// Detector samples; 0 means exact expectation values.
  int shots = 0;
  std::uint64_t seed = 1;
  bool compute_fidelity = true;
};

struct QndRunRecord {
  ProtocolConfig config;
  double gamma = 0.0;
  double theta = 0.0;     // -T (delta2 + gamma n_true)
  double expect_D = 0.0;
  double n_est_real = 0.0;
  long n_est = 0;
  double residual = 0.0;  // |n_est_real - n_est|
  double bias = 0.0;      // n_est_real - n_true
  bool ambiguous = false;
  std::optional<double> fidelity_probe;  // Fock backend only
  double signal_photons_after = 0.0;
  std::string status = "ok";
};

/// Interaction time placing n = 0..n_search_max on the monotonic half of the
/// arccos branch: pi / (2 (delta2 + gamma n_search_max)).
double recommended_interaction_time(double delta2, double gamma,
                                    int n_search_max = 5);

/// Throws PhaseAliasing unless T (delta2 + gamma n) lies in [0, pi] for
/// every n in 0..n_max.
void check_phase_window(double T, double delta2, double gamma, int n_max);

struct Estimate {
  double n_est_real = 0.0;
  long n_est = 0;
  bool ambiguous = false;
};

/// Inverts D = |alpha|^2 cos(T (delta2 + gamma n)). Throws OutOfRange when
/// |D| exceeds |alpha|^2 beyond rounding or gamma <= 0, PhaseAliasing when
/// the window check is on and fails.
Estimate estimate_n(double expect_D, cplx alpha, double T, double delta2,
                    double gamma, int n_search_max = 5,
                    double resolution = 1e-6, bool check_window = true);

/// One protocol execution. The analytic backend supports EffectiveIdeal
/// only (UnsupportedBackend otherwise).
QndRunRecord run_protocol(const ProtocolConfig& cfg, const Rates& rates);

enum class SweepAxis { NTrue, Alpha, T, SigmaScale };
std::string_view to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(std::string_view s);

/// run_protocol over a grid. Errors become the record's status instead of
/// aborting; records come back in grid order for any execution mode.
std::vector<QndRunRecord> sweep(
    const ProtocolConfig& base, const Rates& rates, SweepAxis axis,
    const std::vector<double>& grid,
    linalg::Execution exec = linalg::Execution::Parallel);

nlohmann::json to_json(const QndRunRecord& r);
/// CSV with a schema comment line first.
std::string records_csv(const std::vector<QndRunRecord>& records);

}  // namespace cavqnd

#endif  // CAVQND_QND_HPP
