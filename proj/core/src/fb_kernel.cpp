#include "fbrelay/fb_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fbrelay/errors.hpp"

namespace fbrelay {

namespace {

constexpr double kLog2E = std::numbers::log2e;

void require_nonnegative(double rho, const char* what) {
  if (!(rho >= 0.0)) {
    throw std::domain_error(std::string(what) + ": SNR must be nonnegative");
  }
}

double normal_pdf(double t) { return std::exp(-0.5 * t * t) * std::numbers::inv_sqrtpi / std::numbers::sqrt2; }

}  // namespace

CodingSpec CodingSpec::make(std::int64_t k, std::int64_t n) {
  if (k < 1) {
    throw ConfigError("information bits k must be >= 1, got " + std::to_string(k));
  }
  if (n < kMinBlocklength) {
    throw ConfigError("blocklength n must be >= 100, got " + std::to_string(n));
  }
  return CodingSpec{k, n};
}

double shannon_capacity(double rho) {
  require_nonnegative(rho, "shannon_capacity");
  return std::log1p(rho) * kLog2E;
}

double channel_dispersion(double rho) {
  require_nonnegative(rho, "channel_dispersion");
  const double s = 1.0 + rho;
  return rho * (2.0 + rho) / (s * s);
}

double q_function(double t) { return 0.5 * std::erfc(t / std::numbers::sqrt2); }

double q_inverse(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("q_inverse: probability must lie in (0, 1)");
  }
  // Q(-40) == 1 and Q(40) == 0 in double precision.
  double lo = -40.0;
  double hi = 40.0;
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (q_function(mid) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double t = 0.5 * (lo + hi);
  for (int i = 0; i < 8; ++i) {
    const double density = normal_pdf(t);
    if (density <= 0.0) break;
    const double step = (q_function(t) - p) / density;
    const double next = std::clamp(t + step, lo, hi);
    if (next == t) break;
    t = next;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(t))) break;
  }
  return t;
}

double max_coding_rate(double rho, std::int64_t n, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::domain_error("max_coding_rate: epsilon must lie in (0, 1)");
  }
  const double penalty = std::sqrt(channel_dispersion(rho) / static_cast<double>(n)) * q_inverse(epsilon) * kLog2E;
  return shannon_capacity(rho) - penalty;
}

double normal_approx_argument(double rho, double rate, double n) {
  require_nonnegative(rho, "normal_approx_argument");
  const double dispersion = channel_dispersion(rho);
  if (dispersion == 0.0) {
    return rate > 0.0 ? -std::numeric_limits<double>::infinity() : 0.0;
  }
  return std::sqrt(n) * (shannon_capacity(rho) - rate) / (std::sqrt(dispersion) * kLog2E);
}

double awgn_outage(double rho, double rate, double n) {
  return q_function(normal_approx_argument(rho, rate, n));
}

double linearization_slope(double rate, double n, MuVariant variant) {
  const double growth = variant == MuVariant::exact_base2 ? std::exp2(2.0 * rate) : std::exp(2.0 * rate);
  return std::sqrt(n / (2.0 * std::numbers::pi)) / std::sqrt(growth - 1.0);
}

LinearizationParams linearize(double rate, double n, double average_snr, MuVariant variant) {
  LinearizationParams p;
  p.theta = std::exp2(rate) - 1.0;
  p.mu = linearization_slope(rate, n, variant);
  const double half = 0.5 / p.mu;
  p.vartheta = p.theta + half;
  p.varrho = p.theta - half;
  p.zeta = average_snr * std::sqrt(2.0 * std::numbers::pi) * p.mu;
  p.theta_m = p.theta / average_snr;
  return p;
}

LinearizationParams linearize(const CodingSpec& spec, double average_snr, MuVariant variant) {
  return linearize(spec.rate(), static_cast<double>(spec.n), average_snr, variant);
}

double linearized_q(double t, const LinearizationParams& params) {
  if (t <= params.varrho) return 1.0;
  if (t >= params.vartheta) return 0.0;
  return std::clamp(0.5 - params.mu * (t - params.theta), 0.0, 1.0);
}

}  // namespace fbrelay
