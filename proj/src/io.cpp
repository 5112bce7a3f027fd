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

#include "cavqnd/io.hpp"

#include <cstdio>
#include <sstream>

namespace cavqnd {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json to_json(const Rates& r) {
  return nlohmann::json{
      {"omega_m", r.omega_m},       {"g", r.g},
      {"G_inner", r.G_inner},       {"G_outer", r.G_outer},
      {"delta1", r.delta1},         {"delta2", r.delta2},
      {"delta1_s", r.delta1_s},     {"delta2_s", r.delta2_s},
      {"lambda1", r.lambda1},       {"lambda2", r.lambda2},
      {"nu", r.nu},                 {"chi", r.chi},
      {"r_squeeze", r.r_squeeze},   {"omega_s", r.omega_s},
      {"g_s", r.g_s},               {"gamma", r.gamma},
      {"sigma_inner", r.sigma_inner}, {"sigma_outer", r.sigma_outer},
      {"appendix_a_sign", std::string(to_string(r.sign))}};
}

nlohmann::json to_json(const DerivedParams& p) {
  // Flat object: dimensionless rates under their plain names, SI rates with
  // an _si suffix, mechanical quantities with their unit.
  nlohmann::json j = to_json(p.scaled);
  const nlohmann::json si = to_json(p.si);
  for (auto& [k, v] : si.items()) {
    if (k == "appendix_a_sign") continue;
    j[k + "_si"] = v;
  }
  j["rho_J_m"] = p.rho;
  j["rho0_J_m"] = p.rho0;
  j["alpha_force_N"] = p.alpha_force;
  j["d1_m"] = p.d1;
  j["d2_m"] = p.d2;
  j["d01_m"] = p.d01;
  j["d02_m"] = p.d02;
  j["Q_inner_N_per_m"] = p.Q_inner;
  j["Q_outer_N_per_m"] = p.Q_outer;
  j["g0_rad_per_s_m"] = p.g0;
  j["x_zpf_m"] = p.x_zpf;
  j["V0_inner_J"] = p.V0_inner;
  j["V0_outer_J"] = p.V0_outer;
  return j;
}

std::string rates_hash(const Rates& r) {
  return hex64(fnv1a64(to_json(r).dump()));
}

}  // namespace cavqnd
