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

#include "cavqnd/config.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "cavqnd/errors.hpp"

namespace cavqnd {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) {
    throw ConfigError("key '" + key + "': cannot parse '" + value +
                      "' as a number");
  }
  return v;
}

const std::set<std::string>& known_top_level() {
  static const std::set<std::string> keys = {
      "omega_c", "omega_m", "mass",  "cavity_length", "r0",   "R0",
      "q1",      "q2",      "q01",   "q00",           "q02",  "q22",
      "coulomb_k", "hbar", "geometry_ratio_max", "appendix_a_sign"};
  return keys;
}

const std::set<std::string>& known_dimensionless() {
  static const std::set<std::string> keys = {
      "g_over_wm", "G_over_wm", "G0_over_wm", "delta1",
      "delta2",    "T",         "alpha",      "alpha_im"};
  return keys;
}

}  // namespace

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

const std::string* ConfigFile::find(const std::string& section,
                                    const std::string& key) const {
  auto s = sections.find(section);
  if (s == sections.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

ConfigFile parse_config(const std::string& text) {
  ConfigFile out;
  out.sections[""];
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) +
                          ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "dimensionless") {
        throw ConfigError("line " + std::to_string(line_no) +
                          ": unknown section [" + section + "]");
      }
      out.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": empty key or value");
    }
    const auto& known =
        section.empty() ? known_top_level() : known_dimensionless();
    if (!known.count(key)) {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" +
                        key + "'");
    }
    if (!out.sections[section].emplace(key, value).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" +
                        key + "'");
    }
  }
  return out;
}

ConfigFile load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

const std::vector<std::string>& required_si_keys() {
  static const std::vector<std::string> keys = {
      "omega_c", "omega_m", "mass", "cavity_length", "r0",  "R0",
      "q1",      "q2",      "q01",  "q00",           "q02", "q22"};
  return keys;
}

RunConfig interpret_config(const ConfigFile& file) {
  RunConfig rc;
  auto get = [&](const std::string& sec, const std::string& key) {
    return file.find(sec, key);
  };

  if (const auto* s = get("", "appendix_a_sign")) {
    rc.appendix_a_sign = sign_convention_from_string(*s);
  }

  bool any_si = false;
  for (const auto& k : required_si_keys()) any_si |= file.has("", k);
  if (any_si) {
    for (const auto& k : required_si_keys()) {
      if (!file.has("", k)) {
        throw ConfigError("missing required key '" + k + "'");
      }
    }
    PhysicalConfig pc;
    auto num = [&](const std::string& k) { return parse_double(k, *get("", k)); };
    pc.omega_c = num("omega_c");
    pc.omega_m = num("omega_m");
    pc.mass = num("mass");
    pc.cavity_length = num("cavity_length");
    pc.r0 = num("r0");
    pc.R0 = num("R0");
    pc.q1 = num("q1");
    pc.q2 = num("q2");
    pc.q01 = num("q01");
    pc.q00 = num("q00");
    pc.q02 = num("q02");
    pc.q22 = num("q22");
    if (file.has("", "coulomb_k")) pc.coulomb_k = num("coulomb_k");
    if (file.has("", "hbar")) pc.hbar = num("hbar");
    if (file.has("", "geometry_ratio_max")) {
      pc.geometry_ratio_max = num("geometry_ratio_max");
    }
    pc.appendix_a_sign = rc.appendix_a_sign;
    rc.physical = pc;
  }

  const std::string dim = "dimensionless";
  auto dnum = [&](const std::string& k) -> std::optional<double> {
    if (const auto* s = get(dim, k)) return parse_double(k, *s);
    return std::nullopt;
  };
  rc.g_over_wm = dnum("g_over_wm");
  rc.G_over_wm = dnum("G_over_wm");
  if (const auto* s = get(dim, "G0_over_wm"); s && *s != "cancel") {
    rc.G0_over_wm = parse_double("G0_over_wm", *s);
  }
  rc.delta1 = dnum("delta1").value_or(0.0);
  rc.delta2 = dnum("delta2").value_or(0.0);
  rc.T = dnum("T");
  rc.alpha = {dnum("alpha").value_or(2.0), dnum("alpha_im").value_or(0.0)};

  if (!rc.physical) {
    if (!rc.g_over_wm) {
      throw ConfigError("missing required key 'g_over_wm' (no SI block given)");
    }
    if (!rc.G_over_wm) {
      throw ConfigError("missing required key 'G_over_wm' (no SI block given)");
    }
  }
  return rc;
}

Rates run_rates(const RunConfig& rc) {
  RateInputs in;
  in.sign = rc.appendix_a_sign;
  if (rc.physical) {
    const DerivedParams p =
        derive_params(*rc.physical, DetuningOverride{rc.delta1, rc.delta2});
    in.g = p.scaled.g;
    in.G_inner = p.scaled.G_inner;
    in.G_outer = p.scaled.G_outer;
  }
  if (rc.g_over_wm) in.g = *rc.g_over_wm;
  if (rc.G_over_wm) in.G_inner = *rc.G_over_wm;
  if (rc.G0_over_wm) {
    in.G_outer = *rc.G0_over_wm;
  } else if (!rc.physical) {
    in.G_outer = solve_cancellation(in.G_inner);
  }
  in.delta1 = in.delta1_s = rc.delta1;
  in.delta2 = in.delta2_s = rc.delta2;
  return derive_rates(in);
}

}  // namespace cavqnd
