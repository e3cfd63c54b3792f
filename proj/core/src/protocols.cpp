#include "fbrelay/protocols.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbrelay/errors.hpp"
#include "fbrelay/quadrature.hpp"

namespace fbrelay {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::closed_form: return "closed_form";
    case Method::integral: return "integral";
    case Method::monte_carlo: return "monte_carlo";
    case Method::asymptotic: return "asymptotic";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return c == '-' ? '_' : std::tolower(c); });
  if (s == "closed_form" || s == "cf") return Method::closed_form;
  if (s == "integral") return Method::integral;
  if (s == "monte_carlo" || s == "mc") return Method::monte_carlo;
  if (s == "asymptotic") return Method::asymptotic;
  throw ConfigError("unknown evaluation method '" + std::string(text) + "'");
}

double combine_df(double eps_sr, double eps_rd) { return eps_sr + (1.0 - eps_sr) * eps_rd; }

double combine_sc(double eps_sd, double eps_sr, double eps_rd) {
  return eps_sd * eps_sr + (1.0 - eps_sr) * eps_sd * eps_rd;
}

double combine_mrc(double eps_sd, double eps_sr, double eps_srd) {
  return eps_sd * eps_sr + (1.0 - eps_sr) * eps_srd;
}

double recombine(const OutageReport& r) {
  switch (r.protocol) {
    case Protocol::dt: return r.eps_sd;
    case Protocol::df: return combine_df(r.eps_sr, r.eps_rd);
    case Protocol::sc: return combine_sc(r.eps_sd, r.eps_sr, r.eps_rd);
    case Protocol::mrc: return combine_mrc(r.eps_sd, r.eps_sr, r.eps_srd);
  }
  return OutageReport::kUnset;
}

// ---- combined branch --------------------------------------------------------

double sum_snr_pdf(double w, double omega_z, double omega_y) {
  if (!(omega_z > 0.0 && omega_y > 0.0)) {
    throw std::domain_error("sum_snr_pdf: average SNRs must be positive");
  }
  if (w < 0.0) return 0.0;
  const double hi = std::max(omega_z, omega_y);
  const double lo = std::min(omega_z, omega_y);
  if (hi - lo < kEqualMeansThreshold * hi) {
    const double omega = 0.5 * (hi + lo);
    return w / (omega * omega) * std::exp(-w / omega);
  }
  // (e^{-w/hi} - e^{-w/lo}) / (hi - lo) without cancellation.
  return std::exp(-w / hi) * -std::expm1(-w * (1.0 / lo - 1.0 / hi)) / (hi - lo);
}

namespace {

bool equal_means(double z, double y) { return std::abs(z - y) < kEqualMeansThreshold * std::max(z, y); }

// f(Omega) = Omega^2 (e^{-varrho/Omega} - e^{-vartheta/Omega}); the distinct-means
// outage is 1 - mu (f(Z) - f(Y)) / (Z - Y).
double f_prime(double omega, const LinearizationParams& p) {
  return (2.0 * omega + p.varrho) * std::exp(-p.varrho / omega) -
         (2.0 * omega + p.vartheta) * std::exp(-p.vartheta / omega);
}

double f_third(double omega, const LinearizationParams& p) {
  const double a = p.varrho;
  const double b = p.vartheta;
  return (a * a * a * std::exp(-a / omega) - b * b * b * std::exp(-b / omega)) / std::pow(omega, 4);
}

// Integral of K over W when varrho < 0, so K(0) = 1/2 + mu theta < 1.
double mrc_negative_lower_breakpoint(double z, double y, const LinearizationParams& p) {
  const double b = p.vartheta;
  double survival_area = 0.0;
  if (equal_means(z, y)) {
    const double omega = 0.5 * (z + y);
    survival_area = 2.0 * omega - (b + 2.0 * omega) * std::exp(-b / omega);
  } else {
    survival_area = (z * z * -std::expm1(-b / z) - y * y * -std::expm1(-b / y)) / (z - y);
  }
  return 0.5 + p.mu * p.theta - p.mu * survival_area;
}

constexpr double kSeriesGap = 1e-3;

// Above this value of vartheta / min(omega) the closed form is used; below
// it, the closed form loses everything to cancellation and the series wins.
constexpr double kSmallArgument = 0.25;

// Integral over [0, w] of P(Z + Y <= t), for Z, Y exponential with rates a, b:
// sum over m >= 2 of (-1)^m w^(m+1) / (m+1)! * a b h_(m-2)(a, b), where h_j is
// the complete homogeneous polynomial of degree j.
double sum_cdf_area(double w, double a, double b) {
  if (w <= 0.0) return 0.0;
  double h = 1.0;
  double b_pow = 1.0;
  double coeff = w * w * w / 6.0;
  double total = 0.0;
  for (int m = 2; m < 64; ++m) {
    const double term = coeff * a * b * h;
    total += (m % 2 == 0) ? term : -term;
    if (std::abs(term) < 1e-17 * std::abs(total)) break;
    coeff *= w / (m + 2);
    b_pow *= b;
    h = a * h + b_pow;
  }
  return total;
}

double mrc_small_argument(double omega_z, double omega_y, const LinearizationParams& p) {
  const double a = 1.0 / omega_z;
  const double b = 1.0 / omega_y;
  return p.mu * (sum_cdf_area(p.vartheta, a, b) - sum_cdf_area(std::max(p.varrho, 0.0), a, b));
}

}  // namespace

MrcClosedFormTerms mrc_closed_form_terms(double omega_z, double omega_y, const LinearizationParams& p) {
  MrcClosedFormTerms t;
  const double mu = p.mu;
  t.varphi = p.varrho / omega_z;
  t.alpha = p.vartheta / omega_z;
  t.delta = std::exp(-t.varphi) - std::exp(-t.alpha);
  t.lambda1 = mu * (p.vartheta + omega_z - p.theta) - 0.5;
  t.lambda2 = mu * (p.theta - p.varrho - omega_z) - 0.5;
  t.lambda3 = 0.5 - mu * (p.vartheta + omega_y - p.theta);
  t.lambda4 = 0.5 + mu * (p.varrho + omega_y - p.theta);
  const double e_hi = std::exp(-p.vartheta / omega_z);
  const double e_lo = std::exp(-p.varrho / omega_z);
  t.tau = p.vartheta * p.vartheta * e_hi - p.varrho * p.varrho * e_lo - p.theta * p.vartheta * e_hi +
          p.theta * p.varrho * e_lo;
  t.xi = p.vartheta * e_hi - p.varrho * e_lo + omega_z * e_hi - omega_z * e_lo;
  t.branch = equal_means(omega_z, omega_y) ? MeanBranch::equal_means : MeanBranch::distinct_means;
  return t;
}

double mrc_branch_outage(double omega_z, double omega_y, const LinearizationParams& p) {
  if (!(omega_z > 0.0 && omega_y > 0.0)) {
    throw std::domain_error("mrc_branch_outage: average SNRs must be positive");
  }
  double eps = 0.0;
  if (p.vartheta < kSmallArgument * std::min(omega_z, omega_y)) {
    eps = mrc_small_argument(omega_z, omega_y, p);
  } else if (p.varrho < 0.0) {
    eps = mrc_negative_lower_breakpoint(omega_z, omega_y, p);
  } else if (equal_means(omega_z, omega_y)) {
    const double omega = 0.5 * (omega_z + omega_y);
    const MrcClosedFormTerms t = mrc_closed_form_terms(omega, omega, p);
    eps = 1.0 + p.mu * (t.xi - omega * t.delta);
  } else if (std::abs(omega_z - omega_y) < kSeriesGap * std::max(omega_z, omega_y)) {
    // Central divided difference of f, exact through O(h^2).
    const double m = 0.5 * (omega_z + omega_y);
    const double h = omega_z - omega_y;
    eps = 1.0 - p.mu * (f_prime(m, p) + f_third(m, p) * h * h / 24.0);
  } else {
    const MrcClosedFormTerms t = mrc_closed_form_terms(omega_z, omega_y, p);
    const double z = omega_z;
    const double y = omega_y;
    const double numerator = z - y + z * std::exp(-t.alpha) * t.lambda1 + z * std::exp(-t.varphi) * t.lambda2 +
                             y * std::exp(-p.vartheta / y) * t.lambda3 + y * std::exp(-p.varrho / y) * t.lambda4;
    eps = numerator / (z - y);
  }
  return std::clamp(eps, 0.0, 1.0);
}

double mrc_branch_integral(double omega_z, double omega_y, double rate, double n) {
  if (!(omega_z > 0.0 && omega_y > 0.0)) {
    throw std::domain_error("mrc_branch_integral: average SNRs must be positive");
  }
  const double theta = std::exp2(rate) - 1.0;
  const double sigma = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * linearization_slope(rate, n));
  // (1 + t/W) e^{-t/W} < 1e-14 beyond 40 W.
  const double upper = 40.0 * std::max(omega_z, omega_y);
  std::vector<double> points{0.0, upper};
  for (double m : {-12.0, -4.0, -1.0, 0.0, 1.0, 4.0, 12.0, 40.0}) {
    const double t = theta + m * sigma;
    if (t > 0.0 && t < upper) points.push_back(t);
  }
  const auto integrand = [&](double w) { return awgn_outage(w, rate, n) * sum_snr_pdf(w, omega_z, omega_y); };
  return std::clamp(integrate_segments(integrand, points).value, 0.0, 1.0);
}

// ---- protocol evaluation -----------------------------------------------------

namespace {

double link(double gamma, double rate, double n, Method method, MuVariant variant) {
  if (gamma <= 0.0) return 1.0;
  switch (method) {
    case Method::closed_form: return link_outage_closed_form(gamma, rate, n, variant);
    case Method::integral: return link_outage_integral(gamma, rate, n);
    case Method::asymptotic: return std::min(1.0, (std::exp2(rate) - 1.0) / gamma);
    case Method::monte_carlo: break;
  }
  throw std::invalid_argument("Monte Carlo outage is produced by simulate_report()");
}

double branch(double omega_z, double omega_y, double rate, double n, Method method, MuVariant variant) {
  if (omega_z <= 0.0 && omega_y <= 0.0) return 1.0;
  if (omega_y <= 0.0) return link(omega_z, rate, n, method, variant);
  if (omega_z <= 0.0) return link(omega_y, rate, n, method, variant);
  switch (method) {
    case Method::closed_form: return mrc_branch_outage(omega_z, omega_y, linearize(rate, n, 1.0, variant));
    case Method::integral: return mrc_branch_integral(omega_z, omega_y, rate, n);
    case Method::asymptotic: {
      const double th = std::exp2(rate) - 1.0;
      return std::min(1.0, th * th / (2.0 * omega_z * omega_y));
    }
    case Method::monte_carlo: break;
  }
  throw std::invalid_argument("Monte Carlo outage is produced by simulate_report()");
}

struct PhaseCoding {
  double rate_s, n_s, rate_r, n_r;
};

PhaseCoding phases(const SystemConfig& c) {
  return {c.source_coding().rate(), static_cast<double>(c.n_s), c.relay_coding().rate(), static_cast<double>(c.n_r)};
}

}  // namespace

OutageReport outage_dt(const SystemConfig& config, Method method) {
  const SnrState snr = average_snrs(config);
  const PhaseCoding ph = phases(config);
  OutageReport r{Protocol::dt, method};
  r.eps_sd = link(snr.gamma_direct, ph.rate_s, ph.n_s, method, config.mu_variant);
  r.eps_end = r.eps_sd;
  return r;
}

OutageReport outage_df(const SystemConfig& config, Method method) {
  const SnrState snr = average_snrs(config);
  const PhaseCoding ph = phases(config);
  OutageReport r{Protocol::df, method};
  r.eps_sr = link(snr.gamma_x, ph.rate_s, ph.n_s, method, config.mu_variant);
  r.eps_rd = link(snr.gamma_y, ph.rate_r, ph.n_r, method, config.mu_variant);
  r.eps_end = combine_df(r.eps_sr, r.eps_rd);
  return r;
}

OutageReport outage_sc(const SystemConfig& config, Method method) {
  const SnrState snr = average_snrs(config);
  const PhaseCoding ph = phases(config);
  OutageReport r{Protocol::sc, method};
  r.eps_sd = link(snr.gamma_z, ph.rate_s, ph.n_s, method, config.mu_variant);
  r.eps_sr = link(snr.gamma_x, ph.rate_s, ph.n_s, method, config.mu_variant);
  r.eps_rd = link(snr.gamma_y, ph.rate_r, ph.n_r, method, config.mu_variant);
  r.eps_end = combine_sc(r.eps_sd, r.eps_sr, r.eps_rd);
  return r;
}

OutageReport outage_mrc(const SystemConfig& config, Method method) {
  const SnrState snr = average_snrs(config);
  const PhaseCoding ph = phases(config);
  OutageReport r{Protocol::mrc, method};
  r.eps_sd = link(snr.gamma_z, ph.rate_s, ph.n_s, method, config.mu_variant);
  r.eps_sr = link(snr.gamma_x, ph.rate_s, ph.n_s, method, config.mu_variant);
  r.eps_rd = link(snr.gamma_y, ph.rate_r, ph.n_r, method, config.mu_variant);
  r.eps_srd = branch(snr.gamma_z, snr.gamma_y, ph.rate_r, ph.n_r, method, config.mu_variant);
  r.eps_end = combine_mrc(r.eps_sd, r.eps_sr, r.eps_srd);
  return r;
}

OutageReport evaluate_outage(const SystemConfig& config, Method method) {
  if (method == Method::monte_carlo) {
    throw std::invalid_argument("Monte Carlo outage is produced by simulate_report()");
  }
  switch (config.protocol) {
    case Protocol::dt: return outage_dt(config, method);
    case Protocol::df: return outage_df(config, method);
    case Protocol::sc: return outage_sc(config, method);
    case Protocol::mrc: return outage_mrc(config, method);
  }
  throw std::invalid_argument("unknown protocol");
}

double asymptotic_outage(const SystemConfig& config, Protocol protocol) {
  SystemConfig c = config;
  c.protocol = protocol;
  return evaluate_outage(c, Method::asymptotic).eps_end;
}

}  // namespace fbrelay
