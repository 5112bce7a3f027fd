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

// Plain-text run configuration.
//
//   # SI block, flat namespace
//   omega_m = 6.283185307e6
//   q1 = 1e-13
//   ...
//   [dimensionless]
//   g_over_wm = 0.01
//   G_over_wm = 0.05
//
// The SI keys are all-or-nothing: as soon as one is present every required
// key must be. A file with only a [dimensionless] section describes a
// desk-scale run in units of omega_m.

#ifndef CAVQND_CONFIG_HPP
#define CAVQND_CONFIG_HPP

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cavqnd/params.hpp"

namespace cavqnd {

/// Raw parsed file: section name ("" for the top level) -> key -> value.
struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const;
  const std::string* find(const std::string& section,
                          const std::string& key) const;
};

/// Throws ConfigError with the offending line number on malformed input.
ConfigFile parse_config(const std::string& text);
ConfigFile load_config(const std::string& path);

/// Everything the command-line driver needs from a configuration file.
struct RunConfig {
  std::optional<PhysicalConfig> physical;  // absent for dimensionless-only files
  SignConvention appendix_a_sign = SignConvention::Paper;

  // [dimensionless] overrides, in units of omega_m.
  std::optional<double> g_over_wm;
  std::optional<double> G_over_wm;
  std::optional<double> G0_over_wm;  // unset: pick the cancelling value
  double delta1 = 0.0;
  double delta2 = 0.0;
  std::optional<double> T;
  std::complex<double> alpha{2.0, 0.0};
};

/// Interprets a parsed file. Missing required keys raise ConfigError naming
/// the key.
RunConfig interpret_config(const ConfigFile& file);

/// Dimensionless rates for the run. Applies the [dimensionless] overrides on
/// top of the SI derivation when both are present.
Rates run_rates(const RunConfig& rc);

/// Required SI keys, in file order.
const std::vector<std::string>& required_si_keys();

}  // namespace cavqnd

#endif  // CAVQND_CONFIG_HPP
