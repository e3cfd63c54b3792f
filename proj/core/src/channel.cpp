#include "fbrelay/channel.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <vector>

#include <spdlog/spdlog.h>

#include "fbrelay/errors.hpp"
#include "fbrelay/quadrature.hpp"

namespace fbrelay {

std::string_view to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::dt: return "DT";
    case Protocol::df: return "DF";
    case Protocol::sc: return "SC";
    case Protocol::mrc: return "MRC";
  }
  return "?";
}

Protocol parse_protocol(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "dt") return Protocol::dt;
  if (lower == "df") return Protocol::df;
  if (lower == "sc") return Protocol::sc;
  if (lower == "mrc") return Protocol::mrc;
  throw ConfigError("unknown protocol '" + std::string(text) + "' (expected dt, df, sc or mrc)");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

void SystemConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(d_sd > 0.0)) fail("d_sd must be positive");
  if (!(beta > 0.0 && beta < 1.0)) fail("beta must lie in (0, 1)");
  if (!(eta > 0.0 && eta <= 1.0)) fail("eta must lie in (0, 1]");
  if (!(p_total > 0.0) || !std::isfinite(p_total)) fail("total power must be positive and finite");
  if (!(n0 > 0.0)) fail("n0 must be positive");
  if (n_s < CodingSpec::kMinBlocklength) fail("n_s must be >= 100");
  if (n_r < CodingSpec::kMinBlocklength) fail("n_r must be >= 100");
  if (k < 1) fail("k must be >= 1");
  if (!(path_loss_exponent >= 0.0)) fail("path_loss_exponent must be >= 0");
}

SnrState average_snrs(const SystemConfig& config) {
  config.validate();
  const double nu = config.path_loss_exponent;
  SnrState s;
  s.gamma_x = config.p_source() * std::pow(config.d_sr(), -nu) / config.n0;
  s.gamma_y = config.p_relay() * std::pow(config.d_rd(), -nu) / config.n0;
  s.gamma_z = config.p_source() * std::pow(config.d_sd, -nu) / config.n0;
  s.gamma_direct = config.p_total * std::pow(config.d_sd, -nu) / config.n0;
  return s;
}

double link_outage_integral(double gamma, double rate, double n) {
  if (!(gamma > 0.0)) {
    throw std::domain_error("link_outage_integral: average SNR must be positive");
  }
  const double theta = std::exp2(rate) - 1.0;
  const double sigma = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * linearization_slope(rate, n));
  // Exponential tail beyond `upper` carries less than 1e-14 of the mass.
  const double upper = gamma * 14.0 * std::numbers::ln10;

  std::vector<double> points{0.0, upper};
  for (double m : {-12.0, -4.0, -1.0, 0.0, 1.0, 4.0, 12.0, 40.0}) {
    const double t = theta + m * sigma;
    if (t > 0.0 && t < upper) points.push_back(t);
  }
  const auto integrand = [&](double t) { return awgn_outage(t, rate, n) * std::exp(-t / gamma) / gamma; };
  const double value = integrate_segments(integrand, points).value;
  return std::clamp(value, 0.0, 1.0);
}

double link_outage_integral(double gamma, const CodingSpec& spec) {
  return link_outage_integral(gamma, spec.rate(), static_cast<double>(spec.n));
}

namespace {

// 1 - (1 - e^-y) / y, accurate for small y.
double one_minus_mean_exp(double y) {
  if (y < 1e-4) return y / 2.0 - y * y / 6.0 + y * y * y / 24.0;
  return (y + std::expm1(-y)) / y;
}

double clamp_probability(double value, const char* where) {
  if (value < 0.0 || value > 1.0) {
    spdlog::debug("{}: clamped {:.3e} into [0, 1]", where, value);
  }
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace

double link_outage_closed_form(double gamma, double rate, double n, MuVariant variant) {
  if (!(gamma > 0.0)) {
    throw std::domain_error("link_outage_closed_form: average SNR must be positive");
  }
  const LinearizationParams p = linearize(rate, n, gamma, variant);
  double eps = 0.0;
  if (p.varrho >= 0.0) {
    // 1 - (zeta / sqrt(2 pi)) e^-theta_m (e^c - e^-c), c = sqrt(pi / (2 zeta^2)),
    // regrouped so that no factor overflows as gamma -> 0.
    const double lower = p.varrho / gamma;
    eps = -std::expm1(-lower) + std::exp(-lower) * one_minus_mean_exp(1.0 / (p.mu * gamma));
  } else {
    // The surrogate never reaches 1 on t >= 0: K(0) = 1/2 + mu theta.
    eps = 0.5 + p.mu * p.theta + p.mu * gamma * std::expm1(-p.vartheta / gamma);
  }
  return clamp_probability(eps, "link_outage_closed_form");
}

double link_outage_closed_form(double gamma, const CodingSpec& spec, MuVariant variant) {
  return link_outage_closed_form(gamma, spec.rate(), static_cast<double>(spec.n), variant);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t substream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(substream), static_cast<std::uint32_t>(substream >> 32)};
  engine_.seed(seq);
}

double RandomStream::unit_exponential() noexcept { return -std::log(uniform()); }

SnrState draw_instantaneous_snrs(const SystemConfig& config, RandomStream& stream) {
  SnrState s = average_snrs(config);
  InstantaneousSnr inst;
  const double ex = stream.unit_exponential();
  const double ey = stream.unit_exponential();
  const double ez = stream.unit_exponential();
  inst.omega_x = s.gamma_x * ex;
  inst.omega_y = s.gamma_y * ey;
  inst.omega_z = s.gamma_z * ez;
  inst.omega_direct = s.gamma_direct * ez;
  s.instantaneous = inst;
  return s;
}

// ---- configuration ----------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
  }
  return out;
}

}  // namespace

void apply_setting(SystemConfig& config, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "d_sd") {
    config.d_sd = parse_number<double>(key, value);
  } else if (key == "beta") {
    config.beta = parse_number<double>(key, value);
  } else if (key == "p_total_db") {
    config.set_p_total_db(parse_number<double>(key, value));
  } else if (key == "eta") {
    config.eta = parse_number<double>(key, value);
  } else if (key == "n0") {
    config.n0 = parse_number<double>(key, value);
  } else if (key == "n_s") {
    config.n_s = parse_number<std::int64_t>(key, value);
  } else if (key == "n_r") {
    config.n_r = parse_number<std::int64_t>(key, value);
  } else if (key == "k") {
    config.k = parse_number<std::int64_t>(key, value);
  } else if (key == "path_loss_exponent") {
    config.path_loss_exponent = parse_number<double>(key, value);
  } else if (key == "protocol") {
    config.protocol = parse_protocol(value);
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

SystemConfig parse_config(std::istream& in, SystemConfig base) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    apply_setting(base, trim(view.substr(0, eq)), view.substr(eq + 1));
  }
  return base;
}

SystemConfig load_config(const std::string& path, SystemConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  return parse_config(in, base);
}

void apply_environment(SystemConfig& config,
                       const std::function<std::optional<std::string>(const std::string&)>& lookup) {
  for (std::string_view key : kConfigKeys) {
    std::string name = "FBRELAY_";
    for (char c : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    std::optional<std::string> value;
    if (lookup) {
      value = lookup(name);
    } else if (const char* raw = std::getenv(name.c_str())) {
      value = raw;
    }
    if (value) apply_setting(config, key, *value);
  }
}

std::string format_config(const SystemConfig& config) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "d_sd = " << config.d_sd << '\n'
      << "beta = " << config.beta << '\n'
      << "p_total_db = " << config.p_total_db() << '\n'
      << "eta = " << config.eta << '\n'
      << "n0 = " << config.n0 << '\n'
      << "n_s = " << config.n_s << '\n'
      << "n_r = " << config.n_r << '\n'
      << "k = " << config.k << '\n'
      << "path_loss_exponent = " << config.path_loss_exponent << '\n'
      << "protocol = " << to_string(config.protocol) << '\n';
  return out.str();
}

}  // namespace fbrelay
