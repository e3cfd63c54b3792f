#include "fbrelay/cli/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <spdlog/spdlog.h>

#include "fbrelay/energy.hpp"
#include "fbrelay/errors.hpp"
#include "fbrelay/fb_kernel.hpp"

namespace fbrelay::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_config_key(const std::string& name) {
  for (std::string_view key : kConfigKeys) {
    if (key == name) return true;
  }
  return false;
}

bool is_target_axis(const std::string& v) { return v == "eps_target" || v == "eps_threshold"; }

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void apply_axis(SystemConfig& config, const std::string& variable, double value) {
  if (variable == "n") {
    const auto n = static_cast<std::int64_t>(std::llround(value));
    config.n_s = n;
    config.n_r = n;
  } else if (variable == "k" || variable == "n_s" || variable == "n_r") {
    apply_setting(config, variable, std::to_string(std::llround(value)));
  } else if (variable == "protocol") {
    throw ConfigError("protocol cannot be a sweep axis");
  } else if (is_config_key(variable)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    apply_setting(config, variable, buf);
  }
}

Row base_row(const ExperimentSpec& spec, double value, std::string protocol, std::string method) {
  Row r;
  r.sweep_var = spec.sweep.variable;
  r.value = value;
  r.protocol = std::move(protocol);
  r.method = std::move(method);
  return r;
}

void fill_operating_point(Row& r, const SystemConfig& c) {
  const bool direct = c.protocol == Protocol::dt;
  r.latency = static_cast<double>(c.latency());
  r.p_s = direct ? c.p_total : c.p_source();
  r.p_r = direct ? 0.0 : c.p_relay();
  r.n_s = static_cast<double>(c.n_s);
  r.n_r = direct ? 0.0 : static_cast<double>(c.n_r);
}

void fill_failure(Row& r) {
  r.eps = r.latency = r.ee = r.p_s = r.p_r = r.n_s = r.n_r = kNaN;
}

void outage_rows(const ExperimentSpec& spec, const SystemConfig& point, double value, unsigned mc_workers,
                 std::vector<Row>& out) {
  for (Protocol p : spec.protocols) {
    SystemConfig c = point;
    c.protocol = p;
    for (Method m : spec.methods) {
      Row r = base_row(spec, value, std::string(to_string(p)), std::string(to_string(m)));
      fill_operating_point(r, c);
      OutageReport report;
      if (m == Method::monte_carlo) {
        McSettings mc = spec.monte_carlo;
        mc.workers = mc_workers;
        report = simulate_report(c, mc);
      } else {
        report = evaluate_outage(c, m);
      }
      r.eps = report.eps_end;
      const double eps_sr = std::isnan(report.eps_sr) ? 0.0 : report.eps_sr;
      r.ee = energy_efficiency(c.source_coding().rate(), report.eps_end,
                               protocol_energy(c, spec.optimizer.profile, std::clamp(eps_sr, 0.0, 1.0)));
      out.push_back(std::move(r));
    }
  }
}

void link_rows(const ExperimentSpec& spec, const SystemConfig& c, double snr_db, std::vector<Row>& out) {
  const double rate = c.source_coding().rate();
  const auto n = static_cast<double>(c.n_s);
  const double rho = db_to_linear(snr_db);
  auto push = [&](const std::string& method, double eps) {
    Row r = base_row(spec, snr_db, "link", method);
    r.eps = eps;
    r.latency = n;
    r.ee = kNaN;
    r.p_s = rho;
    r.p_r = 0.0;
    r.n_s = n;
    r.n_r = 0.0;
    out.push_back(std::move(r));
  };
  if (spec.task == Task::q_linearization) {
    const LinearizationParams lp = linearize(rate, n, 1.0, c.mu_variant);
    push("exact", awgn_outage(rho, rate, n));
    push("linearized", linearized_q(rho, lp));
    return;
  }
  for (Method m : spec.methods) {
    double eps = kNaN;
    switch (m) {
      case Method::closed_form: eps = link_outage_closed_form(rho, rate, n, c.mu_variant); break;
      case Method::integral: eps = link_outage_integral(rho, rate, n); break;
      case Method::asymptotic: eps = std::min(1.0, (std::exp2(rate) - 1.0) / rho); break;
      case Method::monte_carlo: throw ConfigError("link sweeps do not support monte_carlo");
    }
    push(std::string(to_string(m)), eps);
  }
}

void optimizer_rows(const ExperimentSpec& spec, const SystemConfig& c, double value, std::vector<Row>& out) {
  const double target = is_target_axis(spec.sweep.variable) ? value : spec.eps_target;
  const char* prefix = spec.task == Task::latency ? "latency-" : "ee-";
  for (Protocol p : spec.protocols) {
    for (Regime g : spec.regimes) {
      Row r = base_row(spec, value, std::string(to_string(p)), prefix + std::string(to_string(g)));
      const OptimizationResult res = spec.task == Task::latency
                                         ? minimize_latency(c, p, target, g, spec.optimizer)
                                         : maximize_ee(c, p, target, g, spec.optimizer);
      r.eps = res.eps_achieved;
      r.latency = res.feasible ? static_cast<double>(res.latency) : kNaN;
      r.ee = res.feasible ? res.ee_achieved : kNaN;
      r.p_s = res.p_s_star;
      r.p_r = res.p_r_star;
      r.n_s = static_cast<double>(res.n_s_star);
      r.n_r = static_cast<double>(res.n_r_star);
      out.push_back(std::move(r));
    }
  }
}

std::size_t expected_rows(const ExperimentSpec& spec) {
  switch (spec.task) {
    case Task::q_linearization: return 2;
    case Task::link_outage: return spec.methods.size();
    case Task::outage: return spec.protocols.size() * spec.methods.size();
    case Task::latency:
    case Task::energy_efficiency: return spec.protocols.size() * spec.regimes.size();
  }
  return 0;
}

std::vector<Row> run_point(const ExperimentSpec& spec, double value, unsigned mc_workers, std::size_t& failures) {
  SystemConfig c = spec.fixed;
  apply_axis(c, spec.sweep.variable, value);
  c.validate();
  std::vector<Row> rows;
  try {
    switch (spec.task) {
      case Task::outage: outage_rows(spec, c, value, mc_workers, rows); break;
      case Task::q_linearization:
      case Task::link_outage: link_rows(spec, c, value, rows); break;
      case Task::latency:
      case Task::energy_efficiency: optimizer_rows(spec, c, value, rows); break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    // Keep the rows that succeeded and pad the rest of this point.
    spdlog::warn("{}: {} = {}: {}", spec.name, spec.sweep.variable, value, e.what());
    const std::size_t want = expected_rows(spec);
    while (rows.size() < want) {
      Row r = base_row(spec, value, "?", "error");
      fill_failure(r);
      rows.push_back(std::move(r));
      ++failures;
    }
  }
  return rows;
}

}  // namespace

std::vector<double> Sweep::values() const {
  if (!std::isfinite(start) || !std::isfinite(stop)) throw ConfigError("sweep bounds must be finite");
  if (stop < start) throw ConfigError("sweep range is empty (stop < start)");
  if (stop > start && !(step > 0.0)) throw ConfigError("sweep step must be positive");
  std::vector<double> out;
  const std::size_t count =
      stop == start ? 1 : static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = start + static_cast<double>(i) * step;
    out.push_back(log10 ? std::pow(10.0, x) : x);
  }
  return out;
}

void ExperimentSpec::validate() const {
  const auto& v = sweep.variable;
  const bool known = v == "n" || v == "snr_db" || is_target_axis(v) || (is_config_key(v) && v != "protocol");
  if (!known) throw ConfigError("unknown sweep variable '" + v + "'");
  if (sweep.values().empty()) throw ConfigError("sweep range is empty");
  const bool link = task == Task::q_linearization || task == Task::link_outage;
  if (link && v != "snr_db") throw ConfigError("link sweeps run over snr_db");
  if (!link && v == "snr_db") throw ConfigError("snr_db is only a link sweep axis");
  if (is_target_axis(v) && task != Task::latency && task != Task::energy_efficiency) {
    throw ConfigError(v + " is only a sweep axis of optimizer experiments");
  }
  if (task != Task::q_linearization && task != Task::latency && task != Task::energy_efficiency &&
      methods.empty()) {
    throw ConfigError("at least one method is required");
  }
  if ((task == Task::outage || task == Task::latency || task == Task::energy_efficiency) && protocols.empty()) {
    throw ConfigError("at least one protocol is required");
  }
  if ((task == Task::latency || task == Task::energy_efficiency) && regimes.empty()) {
    throw ConfigError("at least one regime is required");
  }
  if (workers == 0) throw ConfigError("workers must be >= 1");
  for (Method m : methods) {
    if (m == Method::monte_carlo) monte_carlo.validate();
  }
  optimizer.validate();
  fixed.validate();
}

std::string format_row(const Row& r) {
  std::string s = r.sweep_var;
  for (const std::string& f : {number(r.value), r.protocol, r.method, number(r.eps), number(r.latency), number(r.ee),
                               number(r.p_s), number(r.p_r), number(r.n_s), number(r.n_r)}) {
    s += ',';
    s += f;
  }
  return s;
}

Dataset run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::vector<double> values = spec.sweep.values();
  std::vector<std::vector<Row>> per_point(values.size());
  std::vector<std::size_t> failures(values.size(), 0);
  std::exception_ptr fatal;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};

  const unsigned pool = std::max(1u, std::min<unsigned>(spec.workers, static_cast<unsigned>(values.size())));
  const unsigned mc_workers = pool > 1 ? 1u : spec.workers;
  std::mutex fatal_mutex;
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < values.size() && !stop; i = next.fetch_add(1)) {
      try {
        per_point[i] = run_point(spec, values[i], mc_workers, failures[i]);
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        stop = true;
      }
    }
  };
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (unsigned t = 0; t < pool; ++t) threads.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);

  Dataset data;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (Row& r : per_point[i]) data.rows.push_back(std::move(r));
    data.failed_rows += failures[i];
  }
  return data;
}

void write_csv(const Dataset& data, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const Row& r : data.rows) out << format_row(r) << '\n';
  out.flush();
  if (!out) throw std::ios_base::failure("failed to write CSV output");
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  write_csv(data, out);
}

// ---- presets ------------------------------------------------------------------

std::vector<std::string> preset_names() {
  return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11"};
}

std::optional<ExperimentSpec> preset(const std::string& name) {
  ExperimentSpec s;
  s.name = name;
  const std::vector<Protocol> coop{Protocol::df, Protocol::sc, Protocol::mrc};
  if (name == "fig2") {
    // Q(g(rho)) and its linearization at R = 1.
    s.task = Task::q_linearization;
    s.sweep = {"snr_db", -2.0, 6.0, 0.05};
    s.methods = {};
  } else if (name == "fig3") {
    s.task = Task::link_outage;
    s.sweep = {"snr_db", 0.0, 20.0, 0.5};
    s.fixed.k = 100;
    s.methods = {Method::closed_form, Method::integral};
  } else if (name == "fig4") {
    // Information bits at n = 400 with a path-loss exponent of 3.
    s.sweep = {"k", 20.0, 400.0, 4.0};
    s.fixed.n_s = s.fixed.n_r = 400;
    s.fixed.path_loss_exponent = 3.0;
    s.methods = {Method::closed_form};
  } else if (name == "fig5") {
    s.sweep = {"eta", 0.01, 0.99, 0.01};
    s.fixed.k = 250;
    s.protocols = coop;
    s.methods = {Method::closed_form, Method::integral};
  } else if (name == "fig6") {
    s.sweep = {"p_total_db", 0.0, 20.0, 1.0};
    s.methods = {Method::closed_form, Method::monte_carlo, Method::asymptotic};
  } else if (name == "fig7") {
    s.sweep = {"n", 100.0, 1000.0, 20.0};
    s.methods = {Method::closed_form, Method::integral};
  } else if (name == "fig8") {
    s.task = Task::latency;
    s.sweep = {"eps_target", -5.0, -2.0, 0.25, true};
    s.methods = {};
  } else if (name == "fig9") {
    s.sweep = {"p_total_db", 0.0, 40.0, 1.0};
    s.protocols = coop;
    s.methods = {Method::closed_form};
  } else if (name == "fig10" || name == "fig11") {
    // fig11 plots total energy, E = R (1 - eps) / EE, from the same program.
    s.task = Task::energy_efficiency;
    s.sweep = {"eps_threshold", -4.75, -2.25, 0.25, true};
    s.protocols = coop;
    s.methods = {};
  } else {
    return std::nullopt;
  }
  return s;
}

}  // namespace fbrelay::cli
