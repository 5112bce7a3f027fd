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

#include "cavqnd/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "cavqnd/config.hpp"
#include "cavqnd/errors.hpp"
#include "cavqnd/io.hpp"
#include "cavqnd/model.hpp"
#include "cavqnd/params.hpp"
#include "cavqnd/qnd.hpp"
#include "cavqnd/reduce.hpp"

namespace cavqnd {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Globals {
  std::string config;
  std::string out_dir = ".";
  int jobs = 0;
  std::uint64_t seed = 1;
  std::string sign;  // empty: take the configuration file's value
  bool allow_aliasing = false;
};

struct VerifyOptions {
  std::string suite = "all";
  int mech_dim = 60;
  int n_max = 3;
  int draws = 1000;
  int bogoliubov_dim = 24;
  int bogoliubov_trials = 16;
};

struct ProtocolOptions {
  int n_true = 3;
  std::optional<double> alpha;
  std::optional<double> alpha_im;
  std::optional<double> T;
  std::optional<double> delta2;
  std::string hamiltonian = "ideal";
  std::string backend = "analytic";
  int probe_dim = 40;
  int mech_dim = 4;
  double sigma_scale = 1.0;
  int n_search_max = 5;
  int shots = 0;
};

struct SweepOptions {
  std::string vary = "n_true";
  std::vector<double> values;
};

// Output sink confined to the run's directory.
class Run {
 public:
  Run(std::string command, const Globals& g)
      : command_(std::move(command)), globals_(g), dir_(g.out_dir) {}

  void load_config() {
    if (globals_.config.empty()) {
      throw ConfigError("--config is required");
    }
    std::ifstream in(globals_.config, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + globals_.config + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    config_text_ = ss.str();
    rc_ = interpret_config(parse_config(config_text_));
    if (!globals_.sign.empty()) {
      rc_.appendix_a_sign = sign_convention_from_string(globals_.sign);
    }
  }

  const RunConfig& config() const { return rc_; }

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(dir_);
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << content;
    outputs_.push_back(path.string());
  }

  void write_manifest(int exit_status) {
    json m{{"command", command_},
           {"config_path", globals_.config},
           {"config_hash", hex64(fnv1a64(config_text_))},
           {"tool_version", CAVQND_VERSION},
           {"timestamp", utc_now()},
           {"seed", globals_.seed},
           {"jobs", globals_.jobs},
           {"appendix_a_sign", std::string(to_string(rc_.appendix_a_sign))},
           {"exit_code", exit_status}};
    const auto manifest = (dir_ / "manifest.json").string();
    m["outputs"] = outputs_;
    fs::create_directories(dir_);
    std::ofstream(manifest) << m.dump(2) << '\n';
  }

 private:
  static std::string utc_now() {
    const std::time_t t =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }

  std::string command_;
  Globals globals_;
  fs::path dir_;
  std::string config_text_;
  RunConfig rc_;
  std::vector<std::string> outputs_;
};

int code_for(const std::exception& e) {
  if (dynamic_cast<const StabilityViolation*>(&e) ||
      dynamic_cast<const GeometryViolation*>(&e) ||
      dynamic_cast<const SignViolation*>(&e)) {
    return exit_code::kPhysics;
  }
  if (dynamic_cast<const PhaseAliasing*>(&e)) return exit_code::kAliasing;
  if (dynamic_cast<const ConfigError*>(&e) ||
      dynamic_cast<const TruncationTooSmall*>(&e) ||
      dynamic_cast<const UnsupportedBackend*>(&e) ||
      dynamic_cast<const OutOfRange*>(&e) ||
      dynamic_cast<const UnknownMode*>(&e) ||
      dynamic_cast<const MissingMode*>(&e) ||
      dynamic_cast<const InvalidLayout*>(&e)) {
    return exit_code::kConfig;
  }
  return exit_code::kInternal;
}

linalg::Execution execution(const Globals& g) {
  return g.jobs == 1 ? linalg::Execution::Serial : linalg::Execution::Parallel;
}

// ---------------------------------------------------------------- derive

int cmd_derive(Run& run, std::ostream& out) {
  run.load_config();
  const auto& rc = run.config();
  json j = json::object();
  if (rc.physical) {
    j = to_json(derive_params(*rc.physical, {rc.delta1, rc.delta2}));
  }
  const Rates rates = run_rates(rc);
  const json dimensionless = to_json(rates);
  for (auto& [k, v] : dimensionless.items()) j[k] = v;
  run.write("derive.json", j.dump(2) + "\n");

  out << "quantity        value (units of omega_m)\n";
  const std::pair<const char*, double> rows[] = {
      {"g", rates.g},           {"G", rates.G_inner},
      {"G0", rates.G_outer},    {"lambda1", rates.lambda1},
      {"lambda2", rates.lambda2}, {"nu", rates.nu},
      {"chi", rates.chi},       {"r", rates.r_squeeze},
      {"omega_s", rates.omega_s}, {"g_s", rates.g_s},
      {"gamma", rates.gamma},   {"sigma_inner", rates.sigma_inner},
      {"sigma_outer", rates.sigma_outer}};
  for (const auto& [name, value] : rows) {
    out << std::left << std::setw(16) << name << format_double(value) << '\n';
  }
  return exit_code::kOk;
}

// ---------------------------------------------------------------- verify

struct GridOutcome {
  std::vector<SectorSpectrum> sectors;
  json errors = json::array();
};

GridOutcome run_grid(Variant v, const Rates& p, int n_max, int mech_dim,
                     linalg::Execution exec) {
  const int side = n_max + 1, count = side * side;
  std::vector<std::optional<SectorSpectrum>> slots(count);
  std::vector<std::string> messages(count);
  auto one = [&](int k) {
    try {
      slots[k] = sector_ground_energy(v, p, k / side, k % side, mech_dim);
    } catch (const std::exception& e) {
      messages[k] = std::string(error_kind(e)) + ": " + e.what();
    }
  };
  if (exec == linalg::Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < count; ++k) one(k);
  } else {
    for (int k = 0; k < count; ++k) one(k);
  }
  GridOutcome g;
  for (int k = 0; k < count; ++k) {
    if (slots[k]) {
      g.sectors.push_back(*slots[k]);
    } else {
      g.errors.push_back({{"n1", k / side}, {"n2", k % side}, {"error", messages[k]}});
    }
  }
  return g;
}

json check_json(const std::string& name, const std::string& expected,
                double defect, double tol) {
  return to_json(Check{name, expected, defect, tol, defect < tol});
}

json suite_identities(const Rates& rates, const VerifyOptions& o,
                      const Globals& g) {
  const auto at_config = verify_identities(rates);
  const auto sweep = identity_property_sweep(o.draws, g.seed);
  return {{"config", to_json(at_config)},
          {"random_draws", to_json(sweep)},
          {"pass", at_config.all_passed && sweep.all_passed}};
}

json suite_bogoliubov(const Rates& rates, const VerifyOptions& o,
                      const Globals& g) {
  const ModeLayout L({{"b1", o.bogoliubov_dim}, {"b2", o.bogoliubov_dim}});
  const auto r = verify_bogoliubov(rates, L, o.bogoliubov_trials, g.seed);
  auto j = to_json(r);
  j["mech_dim"] = o.bogoliubov_dim;
  return j;
}

json suite_sectors(Run& run, const Rates& rates, const VerifyOptions& o,
                   const Globals& g) {
  constexpr double kTol = 1e-8;
  json j;
  bool pass = true;
  Rates bare = rates;
  bare.delta1 = bare.delta2 = 0.0;

  const auto inner = run_grid(Variant::FullInner, bare, o.n_max, o.mech_dim,
                              execution(g));
  j["inner_errors"] = inner.errors;
  if (!inner.errors.empty()) {
    pass = false;
  } else {
    run.write("sectors_inner.csv", sector_grid_csv(inner.sectors));
    const auto fit = fit_grid(inner.sectors);
    j["inner_fit"] = to_json(fit);
    json checks = json::array();
    checks.push_back(check_json("cross_kerr", "c12 = gamma",
                                std::abs(fit.c12 - rates.gamma), kTol));
    checks.push_back(check_json("self_phase_1", "c11 = -sigma_inner",
                                std::abs(fit.c11 + rates.sigma_inner), kTol));
    checks.push_back(check_json("self_phase_2", "c22 = -sigma_inner",
                                std::abs(fit.c22 + rates.sigma_inner), kTol));
    checks.push_back(check_json("fit_residual", "max |fit - data| (absolute)",
                                fit.residual, kTol));
    for (const auto& c : checks) pass = pass && c["pass"].get<bool>();
    j["inner_checks"] = checks;
  }

  // The outer sign question is informational; only a magnitude mismatch or
  // a failed sector counts against the suite.
  try {
    const auto f = outer_sign_finding(rates, o.n_max, o.mech_dim, execution(g));
    j["outer_sign_finding"] = to_json(f);
    pass = pass && f.magnitude_matches;
  } catch (const Error& e) {
    j["outer_errors"] = std::string(error_kind(e)) + ": " + e.what();
    pass = false;
  }
  j["mech_dim"] = o.mech_dim;
  j["n_max"] = o.n_max;
  j["pass"] = pass;
  return j;
}

int cmd_verify(Run& run, const VerifyOptions& o, const Globals& g,
               std::ostream& out) {
  run.load_config();
  const Rates rates = run_rates(run.config());
  const bool all = o.suite == "all";
  if (!all && o.suite != "identities" && o.suite != "bogoliubov" &&
      o.suite != "sectors") {
    throw ConfigError("unknown suite '" + o.suite +
                      "' (expected identities, bogoliubov, sectors or all)");
  }

  json report{{"rates", to_json(rates)}};
  bool pass = true;
  auto section = [&](const std::string& name, auto&& body) {
    if (!all && o.suite != name) return;
    json s;
    try {
      s = body();
    } catch (const Error& e) {
      s = {{"error", std::string(error_kind(e)) + ": " + e.what()},
           {"pass", false}};
    }
    pass = pass && s["pass"].template get<bool>();
    out << name << ": " << (s["pass"].template get<bool>() ? "pass" : "FAIL")
        << '\n';
    report[name] = std::move(s);
  };
  section("identities", [&] { return suite_identities(rates, o, g); });
  section("bogoliubov", [&] { return suite_bogoliubov(rates, o, g); });
  section("sectors", [&] { return suite_sectors(run, rates, o, g); });
  report["pass"] = pass;

  if (report.contains("sectors") &&
      report["sectors"].contains("outer_sign_finding")) {
    const auto& f = report["sectors"]["outer_sign_finding"];
    out << "outer self-phase coefficient: closed form (+g_s^2/omega_s) = "
        << format_double(f["paper_coefficient"].get<double>())
        << ", oracle fit = " << format_double(f["fitted_c11"].get<double>())
        << " (informational)\n";
  }
  run.write("verify.json", report.dump(2) + "\n");
  return pass ? exit_code::kOk : exit_code::kVerify;
}

// ---------------------------------------------------------------- qnd

ProtocolConfig protocol_config(const RunConfig& rc, const Rates& rates,
                               const ProtocolOptions& o, const Globals& g) {
  ProtocolConfig c;
  c.n_true = o.n_true;
  c.alpha = cplx(o.alpha.value_or(rc.alpha.real()),
                 o.alpha_im.value_or(rc.alpha.imag()));
  c.delta2 = o.delta2.value_or(rc.delta2);
  c.n_search_max = o.n_search_max;
  c.T = o.T ? *o.T
            : rc.T ? *rc.T
                   : recommended_interaction_time(c.delta2, rates.gamma,
                                                  c.n_search_max);
  c.hamiltonian = variant_from_string(o.hamiltonian);
  c.backend = backend_from_string(o.backend);
  c.probe_dim = o.probe_dim;
  c.mech_dim = o.mech_dim;
  c.sigma_scale = o.sigma_scale;
  c.shots = o.shots;
  c.seed = g.seed;
  c.allow_aliasing = g.allow_aliasing;
  if (c.backend == Backend::Fock) {
    const int need = required_coherent_dim(c.alpha);
    if (c.probe_dim < need) {
      throw TruncationTooSmall("probe_dim " + std::to_string(c.probe_dim) +
                               " too small for alpha; need probe_dim >= " +
                               std::to_string(need));
    }
  }
  return c;
}

int cmd_qnd(Run& run, const ProtocolOptions& o, const Globals& g,
            std::ostream& out) {
  run.load_config();
  const Rates rates = run_rates(run.config());
  const auto cfg = protocol_config(run.config(), rates, o, g);
  const auto rec = run_protocol(cfg, rates);
  run.write("qnd.csv", records_csv({rec}));
  run.write("qnd.json", to_json(rec).dump(2) + "\n");
  out << "n_est = " << rec.n_est << '\n'
      << "n_est_real = " << format_double(rec.n_est_real) << '\n'
      << "expect_D = " << format_double(rec.expect_D) << '\n'
      << "theta = " << format_double(rec.theta) << '\n';
  if (rec.ambiguous) out << "warning: estimate is ambiguous at this resolution\n";
  return exit_code::kOk;
}

int cmd_sweep(Run& run, const ProtocolOptions& o, const SweepOptions& s,
              const Globals& g, std::ostream& out) {
  run.load_config();
  if (s.values.empty()) throw ConfigError("--values must list at least one point");
  const Rates rates = run_rates(run.config());
  const auto axis = sweep_axis_from_string(s.vary);
  // The sweep records aliasing per point instead of failing up front.
  ProtocolOptions base_opts = o;
  if (axis == SweepAxis::T && !base_opts.T) base_opts.T = s.values.front();
  const auto base = protocol_config(run.config(), rates, base_opts, g);
  const auto records = sweep(base, rates, axis, s.values, execution(g));

  run.write("sweep.csv", records_csv(records));
  json arr = json::array();
  for (const auto& r : records) arr.push_back(to_json(r));
  run.write("sweep.json",
            json{{"schema", std::string(kRecordSchema)},
                 {"vary", s.vary},
                 {"records", arr}}
                    .dump(2) +
                "\n");
  const auto failed = std::count_if(records.begin(), records.end(),
                                    [](const auto& r) { return r.status != "ok"; });
  out << "points = " << records.size() << ", failed = " << failed << '\n';
  return exit_code::kOk;
}

void add_protocol_options(CLI::App* cmd, ProtocolOptions& o) {
  cmd->add_option("--n-true", o.n_true, "Signal photon number")->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "Probe amplitude, real part (config default)");
  cmd->add_option("--alpha-im", o.alpha_im, "Probe amplitude, imaginary part");
  cmd->add_option("--T", o.T, "Interaction time (default: phase-window rule)");
  cmd->add_option("--delta2", o.delta2, "Probe detuning, units of omega_m");
  cmd->add_option("--hamiltonian", o.hamiltonian,
                  "ideal, simplified, combined, full-inner, full-outer, full-combined")
      ->capture_default_str();
  cmd->add_option("--backend", o.backend, "analytic or fock")->capture_default_str();
  cmd->add_option("--probe-dim", o.probe_dim, "Fock truncation of the arms")
      ->capture_default_str();
  cmd->add_option("--mech-dim", o.mech_dim, "Fock truncation of mechanical modes")
      ->capture_default_str();
  cmd->add_option("--sigma-scale", o.sigma_scale, "Multiplier on self-phase terms")
      ->capture_default_str();
  cmd->add_option("--n-search-max", o.n_search_max, "Largest n the estimator considers")
      ->capture_default_str();
  cmd->add_option("--shots", o.shots, "Detector samples (0: exact expectation)")
      ->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"cavqnd: coupled optomechanical cavities and cross-Kerr photon counting"};
  app.set_version_flag("--version", std::string(CAVQND_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "Configuration file");
  app.add_option("--out-dir", g.out_dir, "Directory for every output")
      ->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads (0: all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", g.seed, "Seed for randomized checks and shot noise")
      ->capture_default_str();
  app.add_option("--appendix-a-sign", g.sign,
                 "Outer self-phase sign: paper or derived")
      ->check(CLI::IsMember({"paper", "derived"}));
  app.add_flag("--allow-aliasing", g.allow_aliasing,
               "Skip the phase-window precondition");

  auto* derive = app.add_subcommand("derive", "Derive every rate from the configuration");
  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "Run verification suites");
  verify->add_option("--suite", vo.suite, "identities, bogoliubov, sectors or all")
      ->capture_default_str();
  verify->add_option("--mech-dim", vo.mech_dim, "Sector truncation")->capture_default_str();
  verify->add_option("--n-max", vo.n_max, "Largest photon number in the sector grid")
      ->capture_default_str();
  verify->add_option("--draws", vo.draws, "Random draws for the identity sweep")
      ->capture_default_str();
  verify->add_option("--bogoliubov-dim", vo.bogoliubov_dim,
                     "Mechanical truncation for the commutator check")
      ->capture_default_str();
  ProtocolOptions qo, so;
  SweepOptions sw;
  auto* qnd = app.add_subcommand("qnd", "Run the counting protocol once");
  add_protocol_options(qnd, qo);
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the protocol over a grid");
  add_protocol_options(sweep_cmd, so);
  sweep_cmd->add_option("--vary", sw.vary, "n_true, alpha, T or sigma_scale")
      ->capture_default_str();
  sweep_cmd->add_option("--values", sw.values, "Comma-separated grid")
      ->delimiter(',')
      ->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::kOk;
  } catch (const CLI::CallForVersion&) {
    out << CAVQND_VERSION << '\n';
    return exit_code::kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kConfig;
  }

  if (g.jobs > 0) omp_set_num_threads(g.jobs);
  const std::string name = app.get_subcommands().front()->get_name();
  Run run(name, g);
  int code = exit_code::kOk;
  try {
    if (derive->parsed()) code = cmd_derive(run, out);
    if (verify->parsed()) code = cmd_verify(run, vo, g, out);
    if (qnd->parsed()) code = cmd_qnd(run, qo, g, out);
    if (sweep_cmd->parsed()) code = cmd_sweep(run, so, sw, g, out);
  } catch (const std::exception& e) {
    code = code_for(e);
    err << "error: " << error_kind(e) << ": " << e.what() << '\n';
  }
  try {
    run.write_manifest(code);
  } catch (const std::exception& e) {
    err << "error: cannot write manifest: " << e.what() << '\n';
    if (code == exit_code::kOk) code = exit_code::kInternal;
  }
  return code;
}

}  // namespace cavqnd
