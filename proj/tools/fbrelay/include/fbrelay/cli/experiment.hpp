#pragma once

// Sweeps over one configuration axis, evaluated per protocol and method and
// written as CSV with the fixed column set:
//   sweep_var,value,protocol,method,eps,latency,ee,p_s,p_r,n_s,n_r

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fbrelay/channel.hpp"
#include "fbrelay/montecarlo.hpp"
#include "fbrelay/optimizer.hpp"
#include "fbrelay/protocols.hpp"

namespace fbrelay::cli {

inline constexpr const char* kCsvHeader = "sweep_var,value,protocol,method,eps,latency,ee,p_s,p_r,n_s,n_r";

/// What each sweep point computes.
enum class Task {
  /// End-to-end outage (and EE at the operating point) per method.
  outage,
  /// Single-link Q(g(rho)) against its linearization over rho (dB).
  q_linearization,
  /// Single-link Rayleigh outage over average SNR (dB), per method.
  link_outage,
  /// minimize_latency per regime with the swept eps target.
  latency,
  /// maximize_ee per regime with the swept eps threshold.
  energy_efficiency,
};

struct Sweep {
  /// One of the SystemConfig keys, or n (sets n_s = n_r), snr_db,
  /// eps_target, eps_threshold.
  std::string variable = "p_total_db";
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;
  /// Values are 10^x for x on the grid.
  bool log10 = false;

  std::vector<double> values() const;
};

struct ExperimentSpec {
  std::string name = "custom";
  Task task = Task::outage;
  Sweep sweep;
  SystemConfig fixed;
  std::vector<Protocol> protocols{Protocol::dt, Protocol::df, Protocol::sc, Protocol::mrc};
  std::vector<Method> methods{Method::closed_form};
  std::vector<Regime> regimes{Regime::epa, Regime::opa};
  McSettings monte_carlo;
  OptimizerSettings optimizer;
  /// Used by latency / energy_efficiency tasks when the sweep is elsewhere.
  double eps_target = 1e-3;
  /// Empty writes to the caller's stream.
  std::string output_path;
  /// Sweep points evaluated concurrently.
  unsigned workers = 1;

  /// Throws ConfigError.
  void validate() const;
};

struct Row {
  std::string sweep_var;
  double value = 0.0;
  std::string protocol;
  std::string method;
  double eps = 0.0;
  double latency = 0.0;
  double ee = 0.0;
  double p_s = 0.0;
  double p_r = 0.0;
  double n_s = 0.0;
  double n_r = 0.0;
};

std::string format_row(const Row& row);

struct Dataset {
  std::vector<Row> rows;
  /// Rows whose evaluator threw; their numeric fields are NaN.
  std::size_t failed_rows = 0;
};

/// Rows ordered by sweep index, then protocol, then method or regime.
Dataset run_experiment(const ExperimentSpec& spec);

/// Writes header and rows. Throws std::ios_base::failure if the path is
/// not writable.
void write_csv(const Dataset& data, std::ostream& out);
void write_csv(const Dataset& data, const std::string& path);

/// fig2 ... fig11. Returns nullopt for unknown names.
std::optional<ExperimentSpec> preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace fbrelay::cli
