#pragma once

// Scenario model: geometry, power split, Rayleigh statistics, and per-link
// outage of a quasi-static Rayleigh link, both by quadrature and in closed
// form via the linearized outage surrogate.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "fbrelay/fb_kernel.hpp"

namespace fbrelay {

enum class Protocol { dt, df, sc, mrc };

std::string_view to_string(Protocol protocol);
/// Accepts "dt", "df", "sc", "mrc" in any case. Throws ConfigError otherwise.
Protocol parse_protocol(std::string_view text);

double db_to_linear(double db);
double linear_to_db(double linear);

struct SystemConfig {
  double d_sd = 1.0;
  /// Relay position as a fraction of the S-D distance.
  double beta = 0.5;
  /// Total transmit power, linear. 20 dB by default.
  double p_total = 100.0;
  /// Fraction of p_total given to the source.
  double eta = 0.5;
  double n0 = 1.0;
  std::int64_t n_s = 500;
  std::int64_t n_r = 500;
  std::int64_t k = 500;
  /// 0 reproduces distance-free average SNRs.
  double path_loss_exponent = 0.0;
  Protocol protocol = Protocol::dt;
  MuVariant mu_variant = MuVariant::exact_base2;

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;

  double p_source() const noexcept { return eta * p_total; }
  double p_relay() const noexcept { return (1.0 - eta) * p_total; }
  double d_sr() const noexcept { return beta * d_sd; }
  double d_rd() const noexcept { return (1.0 - beta) * d_sd; }
  double p_total_db() const { return linear_to_db(p_total); }
  void set_p_total_db(double db) { p_total = db_to_linear(db); }

  CodingSpec source_coding() const { return CodingSpec{k, n_s}; }
  CodingSpec relay_coding() const { return CodingSpec{k, n_r}; }
  /// Channel uses provisioned end to end: n_s for DT, n_s + n_r otherwise.
  std::int64_t latency() const noexcept { return protocol == Protocol::dt ? n_s : n_s + n_r; }

  bool operator==(const SystemConfig&) const = default;
};

/// Instantaneous link SNRs of one fading realization.
struct InstantaneousSnr {
  double omega_x = 0.0;
  double omega_y = 0.0;
  double omega_z = 0.0;
  /// S-D SNR when the source radiates the full power (direct transmission).
  double omega_direct = 0.0;
};

/// X: S-R, Y: R-D, Z: S-D at power eta P; `direct` is S-D at full power.
struct SnrState {
  double gamma_x = 0.0;
  double gamma_y = 0.0;
  double gamma_z = 0.0;
  double gamma_direct = 0.0;
  std::optional<InstantaneousSnr> instantaneous;
};

SnrState average_snrs(const SystemConfig& config);

/// E[Q(g(gamma |h|^2))] over |h|^2 ~ Exp(1), by adaptive quadrature.
/// Throws NumericError if the quadrature misses 1e-10 absolute / 1e-6 relative.
double link_outage_integral(double gamma, const CodingSpec& spec);
double link_outage_integral(double gamma, double rate, double n);

/// Closed-form expectation of the linearized outage over Exp(mean gamma).
double link_outage_closed_form(double gamma, const CodingSpec& spec, MuVariant variant = MuVariant::exact_base2);
double link_outage_closed_form(double gamma, double rate, double n, MuVariant variant = MuVariant::exact_base2);

/// Deterministic random source for fading draws. A (seed, substream) pair
/// always yields the same sequence.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t substream);

  /// Uniform on the open interval (0, 1), on the lattice (j + 1/2) 2^-53.
  double uniform() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  double unit_exponential() noexcept;

 private:
  std::mt19937_64 engine_;
};

/// Omega_i = gamma_i E_i, E_i iid unit-mean exponential, drawn in the order
/// X, Y, Z. Omega_direct reuses the S-D fading of Omega_Z.
SnrState draw_instantaneous_snrs(const SystemConfig& config, RandomStream& stream);

// ---- plain-text configuration ---------------------------------------------

/// Keys accepted in configuration files and environment overrides.
inline constexpr std::string_view kConfigKeys[] = {"d_sd", "beta", "p_total_db", "eta", "n0",
                                                   "n_s",  "n_r",  "k",          "path_loss_exponent",
                                                   "protocol"};

/// Sets one key. Throws ConfigError on unknown keys or unparsable values.
void apply_setting(SystemConfig& config, std::string_view key, std::string_view value);

/// Parses `key = value` lines; `#` starts a comment. Does not validate.
SystemConfig parse_config(std::istream& in, SystemConfig base = {});
SystemConfig load_config(const std::string& path, SystemConfig base = {});

/// Applies FBRELAY_<KEY> variables (e.g. FBRELAY_P_TOTAL_DB). `lookup`
/// defaults to std::getenv.
void apply_environment(SystemConfig& config,
                       const std::function<std::optional<std::string>(const std::string&)>& lookup = {});

/// Inverse of parse_config over the ten configuration keys.
std::string format_config(const SystemConfig& config);

}  // namespace fbrelay
