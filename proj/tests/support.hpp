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

// Shared fixtures for the unit tests.

#ifndef CAVQND_TESTS_SUPPORT_HPP
#define CAVQND_TESTS_SUPPORT_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

#include "cavqnd/params.hpp"

namespace cavqnd::testing {

/// The desk-scale working point used throughout: omega_m = 1, g = 0.01,
/// G = 0.05 and the cancelling outer spring shift.
inline Rates desk_rates(SignConvention sign = SignConvention::Paper) {
  RateInputs in;
  in.g = 0.01;
  in.G_inner = 0.05;
  in.G_outer = solve_cancellation(0.05);
  in.sign = sign;
  return derive_rates(in);
}

inline Rates rates_with(double g, double G, double G0, double delta2 = 0.0) {
  RateInputs in;
  in.g = g;
  in.G_inner = G;
  in.G_outer = G0;
  in.delta2 = in.delta2_s = delta2;
  return derive_rates(in);
}

/// A lab-frame configuration well inside the stable, small-gap regime:
/// G/omega_m ~ 0.011, G0/omega_m ~ 0.0014.
inline PhysicalConfig lab_config() {
  PhysicalConfig c;
  c.omega_c = 1e15;
  c.omega_m = 1e6;
  c.mass = 1e-12;
  c.cavity_length = 1e-2;
  c.r0 = 1e-5;
  c.R0 = 2e-5;
  c.q1 = 5e-14;
  c.q2 = -5e-14;
  c.q01 = 5e-14;
  c.q00 = -5e-14;
  c.q02 = 5e-14;
  c.q22 = -5e-14;
  return c;
}

inline constexpr const char* kLabConfigText =
    "# lab-frame configuration\n"
    "omega_c = 1e15\n"
    "omega_m = 1e6\n"
    "mass = 1e-12\n"
    "cavity_length = 1e-2\n"
    "r0 = 1e-5\n"
    "R0 = 2e-5\n"
    "q1 = 5e-14\n"
    "q2 = -5e-14\n"
    "q01 = 5e-14\n"
    "q00 = -5e-14\n"
    "q02 = 5e-14\n"
    "q22 = -5e-14\n";

inline constexpr const char* kDeskConfigText =
    "[dimensionless]\n"
    "g_over_wm = 0.01\n"
    "G_over_wm = 0.05\n"
    "G0_over_wm = cancel\n"
    "alpha = 2\n";

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("cavqnd_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p) << content;
    return p.string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace cavqnd::testing

#endif  // CAVQND_TESTS_SUPPORT_HPP
