#pragma once

// End-to-end outage of direct transmission and of the three decode-and-forward
// variants (dual-hop DF, selection combining, maximal-ratio combining).

#include <limits>
#include <string_view>

#include "fbrelay/channel.hpp"
#include "fbrelay/fb_kernel.hpp"

namespace fbrelay {

enum class Method { closed_form, integral, monte_carlo, asymptotic };

std::string_view to_string(Method method);
/// Accepts the names printed by to_string (also "closed-form", "mc").
Method parse_method(std::string_view text);

/// Per-link and end-to-end outage. Links a protocol does not use are NaN:
/// DT fills eps_sd only (full power), DF leaves eps_sd and eps_srd unset,
/// SC leaves eps_srd unset.
struct OutageReport {
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

  Protocol protocol = Protocol::dt;
  Method method = Method::closed_form;
  double eps_sd = kUnset;
  double eps_sr = kUnset;
  double eps_rd = kUnset;
  double eps_srd = kUnset;
  double eps_end = kUnset;
};

double combine_df(double eps_sr, double eps_rd);
double combine_sc(double eps_sd, double eps_sr, double eps_rd);
/// eps_SD eps_SR + (1 - eps_SR) eps_SRD.
double combine_mrc(double eps_sd, double eps_sr, double eps_srd);

/// Recomputes eps_end from the per-link fields with the protocol's combiner.
double recombine(const OutageReport& report);

OutageReport outage_dt(const SystemConfig& config, Method method);
OutageReport outage_df(const SystemConfig& config, Method method);
OutageReport outage_sc(const SystemConfig& config, Method method);
OutageReport outage_mrc(const SystemConfig& config, Method method);

/// Dispatches on config.protocol. Method::monte_carlo is rejected here; use
/// simulate_report() from montecarlo.hpp.
OutageReport evaluate_outage(const SystemConfig& config, Method method);

/// High-SNR per-link and combined-branch asymptotes pushed through the
/// protocol combiner.
double asymptotic_outage(const SystemConfig& config, Protocol protocol);

// ---- combined S-D + R-D branch ---------------------------------------------

/// Density of W = Z + Y, Z ~ Exp(omega_z), Y ~ Exp(omega_y).
double sum_snr_pdf(double w, double omega_z, double omega_y);

enum class MeanBranch { equal_means, distinct_means };

/// Relative mean gap under which the equal-means formula is used.
inline constexpr double kEqualMeansThreshold = 1e-6;

struct MrcClosedFormTerms {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  double lambda4 = 0.0;
  double delta = 0.0;
  double varphi = 0.0;
  double alpha = 0.0;
  double tau = 0.0;
  double xi = 0.0;
  MeanBranch branch = MeanBranch::distinct_means;
};

MrcClosedFormTerms mrc_closed_form_terms(double omega_z, double omega_y, const LinearizationParams& params);

/// Expectation of the linearized outage K over the density of Z + Y.
double mrc_branch_outage(double omega_z, double omega_y, const LinearizationParams& params);

/// Expectation of the exact normal-approximation outage over Z + Y, by
/// quadrature. Throws NumericError on non-convergence.
double mrc_branch_integral(double omega_z, double omega_y, double rate, double n);

}  // namespace fbrelay
