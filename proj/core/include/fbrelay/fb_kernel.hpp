#pragma once

// Finite-blocklength normal approximation over an AWGN channel: capacity,
// dispersion, maximal coding rate, outage, and the piecewise-linear
// surrogate of the outage used by the closed-form fading evaluators.
//
// Rates are in bits per channel use throughout. The bits-to-nats conversion
// (division by log2 e) happens only in normal_approx_argument().

#include <cstdint>

namespace fbrelay {

/// k information bits mapped onto n channel uses.
struct CodingSpec {
  std::int64_t k = 0;
  std::int64_t n = 0;

  /// Smallest blocklength for which the normal approximation is trusted.
  static constexpr std::int64_t kMinBlocklength = 100;

  /// Validating constructor; throws ConfigError on k < 1 or n < 100.
  static CodingSpec make(std::int64_t k, std::int64_t n);

  double rate() const noexcept { return static_cast<double>(k) / static_cast<double>(n); }
};

/// C(rho) = log2(1 + rho). Throws std::domain_error for rho < 0.
double shannon_capacity(double rho);

/// V(rho) = rho (2 + rho) / (1 + rho)^2. Throws std::domain_error for rho < 0.
double channel_dispersion(double rho);

/// Gaussian tail Q(t) = erfc(t / sqrt 2) / 2.
double q_function(double t);

/// Inverse of q_function on (0, 1), by bisection followed by Newton polish.
/// Throws std::domain_error outside the open interval.
double q_inverse(double p);

/// R*(n, eps) = C(rho) - sqrt(V(rho) / n) Q^-1(eps) log2 e.
double max_coding_rate(double rho, std::int64_t n, double epsilon);
inline double max_coding_rate(double rho, const CodingSpec& spec, double epsilon) {
  return max_coding_rate(rho, spec.n, epsilon);
}

/// sqrt(n) (C(rho) - R) / (sqrt(V(rho)) log2 e); -inf at rho = 0.
double normal_approx_argument(double rho, double rate, double n);

/// AWGN outage Q(normal_approx_argument). Equals 1 at rho = 0.
double awgn_outage(double rho, double rate, double n);
inline double awgn_outage(double rho, const CodingSpec& spec) {
  return awgn_outage(rho, spec.rate(), static_cast<double>(spec.n));
}

/// Which slope coefficient feeds the linearization.
enum class MuVariant {
  /// sqrt(n / 2pi) (2^(2R) - 1)^(-1/2): the tangent of Q(g(t)) at t = theta.
  exact_base2,
  /// sqrt(n / 2pi) (e^(2R) - 1)^(-1/2), the natural-exponent form.
  natural_exp,
};

/// Constants of the piecewise-linear outage surrogate K(t) for one link.
///
/// K(t) = 1 for t <= varrho, 1/2 - mu (t - theta) on (varrho, vartheta), and 0
/// for t >= vartheta, so vartheta - theta = theta - varrho = 1 / (2 mu).
/// zeta and theta_m are scaled by the link's average SNR.
struct LinearizationParams {
  double theta = 0.0;
  double vartheta = 0.0;
  double varrho = 0.0;
  double mu = 0.0;
  double zeta = 0.0;
  double theta_m = 0.0;

  double half_width() const noexcept { return vartheta - theta; }
};

double linearization_slope(double rate, double n, MuVariant variant = MuVariant::exact_base2);

LinearizationParams linearize(const CodingSpec& spec, double average_snr = 1.0,
                              MuVariant variant = MuVariant::exact_base2);
LinearizationParams linearize(double rate, double n, double average_snr = 1.0,
                              MuVariant variant = MuVariant::exact_base2);

double linearized_q(double t, const LinearizationParams& params);

}  // namespace fbrelay
