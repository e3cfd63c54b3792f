#include "fbrelay/cli/app.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <ios>
#include <ostream>
#include <stdexcept>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "fbrelay/cli/experiment.hpp"
#include "fbrelay/cli/validation.hpp"
#include "fbrelay/errors.hpp"

namespace fbrelay::cli {

namespace {

struct ConfigFlags {
  std::string config_file;
  std::vector<std::string> settings;
  std::optional<double> p_total_db, eta, beta, d_sd, n0, path_loss_exponent;
  std::optional<std::int64_t> k, n, n_s, n_r;
  std::optional<std::string> mu_variant;
};

struct RunFlags {
  std::vector<std::string> protocols;
  std::vector<std::string> methods;
  std::vector<std::string> regimes;
  std::string output;
  std::uint64_t frames = McSettings{}.frames;
  std::uint64_t seed = McSettings{}.seed;
  unsigned workers = 1;
  std::string decode_rule = "outage-probability";
  double eps_target = 1e-3;
  double eps_threshold = 1e-3;
  double grid_resolution = OptimizerSettings{}.grid_resolution;
  bool independent_phases = false;
};

void add_config_options(CLI::App& cmd, ConfigFlags& f) {
  cmd.add_option("--config", f.config_file, "Configuration file (key = value lines)");
  cmd.add_option("--set", f.settings, "Override one key, KEY=VALUE (repeatable)");
  cmd.add_option("--p-total-db", f.p_total_db, "Total transmit power in dB");
  cmd.add_option("--eta", f.eta, "Source share of the total power");
  cmd.add_option("--beta", f.beta, "Relay position as a fraction of d_sd");
  cmd.add_option("--d-sd", f.d_sd, "Source-destination distance");
  cmd.add_option("--n0", f.n0, "Noise power");
  cmd.add_option("--path-loss-exponent", f.path_loss_exponent, "Path-loss exponent");
  cmd.add_option("-k,--k", f.k, "Information bits per packet");
  cmd.add_option("-n,--n", f.n, "Blocklength of both phases");
  cmd.add_option("--n-s", f.n_s, "Broadcast-phase blocklength");
  cmd.add_option("--n-r", f.n_r, "Relaying-phase blocklength");
  cmd.add_option("--mu-variant", f.mu_variant, "Linearization slope: base2 (default) or natural");
}

void add_mc_options(CLI::App& cmd, RunFlags& r) {
  cmd.add_option("--frames", r.frames, "Monte Carlo frames");
  cmd.add_option("--seed", r.seed, "Monte Carlo seed");
  cmd.add_option("--decode-rule", r.decode_rule, "outage-probability or hard-threshold");
}

MuVariant parse_mu_variant(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "base2" || s == "exact" || s == "exact_base2") return MuVariant::exact_base2;
  if (s == "natural" || s == "base-e" || s == "natural_exp") return MuVariant::natural_exp;
  throw ConfigError("unknown mu variant '" + s + "' (expected base2 or natural)");
}

// Layers: base < file < environment < flags.
SystemConfig build_config(SystemConfig base, const ConfigFlags& f, const EnvLookup& env) {
  SystemConfig c = f.config_file.empty() ? base : load_config(f.config_file, base);
  apply_environment(c, env);
  for (const std::string& kv : f.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
    apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.p_total_db) c.set_p_total_db(*f.p_total_db);
  if (f.eta) c.eta = *f.eta;
  if (f.beta) c.beta = *f.beta;
  if (f.d_sd) c.d_sd = *f.d_sd;
  if (f.n0) c.n0 = *f.n0;
  if (f.path_loss_exponent) c.path_loss_exponent = *f.path_loss_exponent;
  if (f.k) c.k = *f.k;
  if (f.n) c.n_s = c.n_r = *f.n;
  if (f.n_s) c.n_s = *f.n_s;
  if (f.n_r) c.n_r = *f.n_r;
  if (f.mu_variant) c.mu_variant = parse_mu_variant(*f.mu_variant);
  c.validate();
  return c;
}

std::vector<Protocol> protocols_from(const std::vector<std::string>& names, std::vector<Protocol> fallback) {
  if (names.empty()) return fallback;
  std::vector<Protocol> out;
  for (const std::string& n : names) {
    if (n == "all") return {Protocol::dt, Protocol::df, Protocol::sc, Protocol::mrc};
    out.push_back(parse_protocol(n));
  }
  return out;
}

std::vector<Method> methods_from(const std::vector<std::string>& names, std::vector<Method> fallback) {
  if (names.empty()) return fallback;
  std::vector<Method> out;
  for (const std::string& n : names) out.push_back(parse_method(n));
  return out;
}

std::vector<Regime> regimes_from(const std::vector<std::string>& names, std::vector<Regime> fallback) {
  if (names.empty()) return fallback;
  std::vector<Regime> out;
  for (const std::string& n : names) out.push_back(parse_regime(n));
  return out;
}

void apply_run_flags(ExperimentSpec& spec, const RunFlags& r) {
  spec.monte_carlo.frames = r.frames;
  spec.monte_carlo.seed = r.seed;
  spec.monte_carlo.workers = r.workers;
  spec.monte_carlo.decode_rule = parse_decode_rule(r.decode_rule);
  spec.optimizer.grid_resolution = r.grid_resolution;
  spec.optimizer.independent_phases = r.independent_phases;
  spec.workers = r.workers;
  if (!r.output.empty()) spec.output_path = r.output;
}

int emit(const ExperimentSpec& spec, std::ostream& out) {
  const Dataset data = run_experiment(spec);
  if (spec.output_path.empty()) {
    write_csv(data, out);
  } else {
    write_csv(data, spec.output_path);
  }
  if (data.failed_rows > 0) spdlog::warn("{} row(s) could not be evaluated", data.failed_rows);
  return kExitOk;
}

class ScopedLogger {
 public:
  ScopedLogger(std::ostream& err, const std::string& level) : previous_(spdlog::default_logger()) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
    auto logger = std::make_shared<spdlog::logger>("fbrelay", sink);
    logger->set_pattern("%l: %v");
    logger->set_level(spdlog::level::from_str(level));
    spdlog::set_default_logger(logger);
  }
  ~ScopedLogger() { spdlog::set_default_logger(previous_); }
  ScopedLogger(const ScopedLogger&) = delete;
  ScopedLogger& operator=(const ScopedLogger&) = delete;

 private:
  std::shared_ptr<spdlog::logger> previous_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app{"Finite-blocklength outage, latency and energy efficiency of relaying protocols", "fbrelay"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "fbrelay 0.1.0");
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();

  ConfigFlags cf;
  RunFlags rf;

  auto* outage = app.add_subcommand("outage", "Outage of one configuration, as CSV");
  auto* sweep = app.add_subcommand("sweep", "Sweep one axis, as CSV");
  auto* latency = app.add_subcommand("optimize-latency", "Minimal latency meeting an outage target");
  auto* ee = app.add_subcommand("optimize-ee", "Maximal energy efficiency under an outage ceiling");
  auto* mc = app.add_subcommand("montecarlo", "Monte Carlo estimate with a 95% interval");
  auto* val = app.add_subcommand("validate", "Cross-check closed form, quadrature and Monte Carlo");
  auto* repro = app.add_subcommand("reproduce", "Regenerate a figure dataset (fig2 ... fig11)");

  for (CLI::App* cmd : {outage, sweep, latency, ee, mc, val, repro}) {
    add_config_options(*cmd, cf);
    cmd->add_option("--workers", rf.workers, "Worker threads");
  }
  for (CLI::App* cmd : {outage, sweep, latency, ee, mc, repro}) {
    cmd->add_option("--protocol", rf.protocols, "dt, df, sc, mrc or all (repeatable)")->delimiter(',');
  }
  for (CLI::App* cmd : {outage, sweep, latency, ee, repro}) {
    cmd->add_option("-o,--output", rf.output, "CSV output path (default stdout)");
  }
  for (CLI::App* cmd : {outage, sweep, mc, val, repro}) add_mc_options(*cmd, rf);
  for (CLI::App* cmd : {outage, sweep}) {
    cmd->add_option("--method", rf.methods, "closed_form, integral, monte_carlo, asymptotic")->delimiter(',');
  }
  for (CLI::App* cmd : {sweep, latency, ee, repro}) {
    cmd->add_option("--regime", rf.regimes, "epa or opa (repeatable)")->delimiter(',');
    cmd->add_option("--grid-resolution", rf.grid_resolution, "Step of the eta grid");
    cmd->add_flag("--independent-phases", rf.independent_phases, "Optimize n_s and n_r separately");
  }
  latency->add_option("--eps-target", rf.eps_target, "Outage target in (0, 0.5)")->capture_default_str();
  ee->add_option("--eps-threshold", rf.eps_threshold, "Outage ceiling")->capture_default_str();
  sweep->add_option("--eps-target", rf.eps_target, "Outage target of optimizer tasks");

  Sweep sw;
  std::string task = "outage";
  sweep->add_option("--var", sw.variable, "Sweep axis")->required();
  sweep->add_option("--from", sw.start, "First value")->required();
  sweep->add_option("--to", sw.stop, "Last value")->required();
  sweep->add_option("--step", sw.step, "Step");
  sweep->add_flag("--log10", sw.log10, "Interpret the grid as exponents of 10");
  sweep->add_option("--task", task, "outage, link, qlin, latency or ee")->capture_default_str();

  ValidationTolerances tol;
  val->add_option("--rel-tol", tol.closed_form_relative, "Closed form vs quadrature relative tolerance");
  val->add_option("--mc-sigmas", tol.mc_sigmas, "Monte Carlo tolerance in standard errors");

  std::string figure;
  repro->add_option("figure", figure, "fig2 ... fig11")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfigError;
  }

  try {
    ScopedLogger logger(err, log_level);
    if (*outage || *latency || *ee) {
      ExperimentSpec spec;
      spec.fixed = build_config(SystemConfig{}, cf, env);
      spec.sweep = Sweep{"p_total_db", spec.fixed.p_total_db(), spec.fixed.p_total_db(), 1.0};
      spec.protocols = protocols_from(rf.protocols, {spec.fixed.protocol});
      apply_run_flags(spec, rf);
      if (*outage) {
        spec.name = "outage";
        spec.methods = methods_from(rf.methods, {Method::closed_form});
      } else {
        spec.name = latency->get_name();
        spec.task = *latency ? Task::latency : Task::energy_efficiency;
        spec.eps_target = *latency ? rf.eps_target : rf.eps_threshold;
        spec.regimes = regimes_from(rf.regimes, {Regime::epa, Regime::opa});
        spec.methods = {};
      }
      return emit(spec, out);
    }
    if (*sweep) {
      ExperimentSpec spec;
      spec.name = "sweep";
      spec.fixed = build_config(SystemConfig{}, cf, env);
      spec.sweep = sw;
      if (task == "outage") {
        spec.task = Task::outage;
      } else if (task == "link") {
        spec.task = Task::link_outage;
      } else if (task == "qlin") {
        spec.task = Task::q_linearization;
      } else if (task == "latency") {
        spec.task = Task::latency;
      } else if (task == "ee") {
        spec.task = Task::energy_efficiency;
      } else {
        throw ConfigError("unknown task '" + task + "'");
      }
      spec.protocols = protocols_from(rf.protocols, spec.protocols);
      spec.methods = methods_from(rf.methods, spec.methods);
      spec.regimes = regimes_from(rf.regimes, spec.regimes);
      spec.eps_target = rf.eps_target;
      apply_run_flags(spec, rf);
      return emit(spec, out);
    }
    if (*mc) {
      const SystemConfig base = build_config(SystemConfig{}, cf, env);
      McSettings settings;
      settings.frames = rf.frames;
      settings.seed = rf.seed;
      settings.workers = rf.workers;
      settings.decode_rule = parse_decode_rule(rf.decode_rule);
      out << "protocol,mean,stderr,ci95_low,ci95_high,frames,failures\n";
      for (Protocol p : protocols_from(rf.protocols, {base.protocol})) {
        SystemConfig c = base;
        c.protocol = p;
        const McEstimate e = simulate_protocol(c, settings);
        char line[256];
        std::snprintf(line, sizeof line, "%s,%.12g,%.12g,%.12g,%.12g,%llu,%llu\n", std::string(to_string(p)).c_str(),
                      e.mean, e.standard_error, e.ci95_low, e.ci95_high,
                      static_cast<unsigned long long>(e.frames_used), static_cast<unsigned long long>(e.failures));
        out << line;
      }
      return kExitOk;
    }
    if (*val) {
      const SystemConfig c = build_config(SystemConfig{}, cf, env);
      McSettings settings;
      settings.frames = rf.frames;
      settings.seed = rf.seed;
      settings.workers = rf.workers;
      settings.decode_rule = parse_decode_rule(rf.decode_rule);
      const ValidationReport report = validate(c, settings, tol);
      print_report(report, out);
      return report.passed() ? kExitOk : kExitValidationFailed;
    }
    if (*repro) {
      std::optional<ExperimentSpec> spec = preset(figure);
      if (!spec) throw ConfigError("unknown figure '" + figure + "'");
      spec->fixed = build_config(spec->fixed, cf, env);
      spec->protocols = protocols_from(rf.protocols, spec->protocols);
      spec->regimes = regimes_from(rf.regimes, spec->regimes);
      apply_run_flags(*spec, rf);
      return emit(*spec, out);
    }
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumericError;
  } catch (const std::ios_base::failure& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::domain_error& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumericError;
  }
  return kExitOk;
}

}  // namespace fbrelay::cli
