#pragma once

// Blocklength and power programs:
//   minimize_latency  smallest provisioned air time with eps_end <= target
//   maximize_ee       largest R(1 - eps)/E with eps_end <= threshold
// over 100 <= n <= 10000 and P_S + P_R <= P_total, plus the power split
// that minimizes outage at a fixed operating point.

#include <cstdint>
#include <string_view>

#include "fbrelay/channel.hpp"
#include "fbrelay/energy.hpp"
#include "fbrelay/protocols.hpp"

namespace fbrelay {

enum class Regime {
  /// P_S = P_R; the common power may be below P_total / 2.
  epa,
  /// Any split with P_S + P_R <= P_total.
  opa,
};

std::string_view to_string(Regime regime);
Regime parse_regime(std::string_view text);

struct OptimizerSettings {
  std::int64_t n_min = CodingSpec::kMinBlocklength;
  std::int64_t n_max = 10'000;
  /// Optimize n_s and n_r separately instead of n_s = n_r.
  bool independent_phases = false;
  /// Step of the eta grid.
  double grid_resolution = 0.01;
  Method method = Method::closed_form;
  PowerProfile profile;

  void validate() const;
};

struct OptimizationResult {
  Protocol protocol = Protocol::dt;
  Regime regime = Regime::epa;
  std::int64_t n_s_star = 0;
  std::int64_t n_r_star = 0;
  double p_s_star = 0.0;
  double p_r_star = 0.0;
  double eps_achieved = 1.0;
  std::int64_t latency = 0;
  double ee_achieved = 0.0;
  bool feasible = false;
  std::uint64_t evaluations = 0;

  double total_power() const noexcept { return p_s_star + p_r_star; }
};

struct EtaOptimum {
  double eta = 0.5;
  double eps_end = 1.0;
  bool unimodal = true;
  std::uint64_t evaluations = 0;
};

/// Grid argmin over eta followed by golden-section refinement on the
/// bracketing cell. DT has no split and returns eta = 1.
EtaOptimum optimal_eta(const SystemConfig& config, Protocol protocol, const OptimizerSettings& settings = {});

/// Exact minimal latency by bisection on the (monotone) blocklength, inner
/// power split minimized for OPA. Ties go to the smallest total power.
OptimizationResult minimize_latency(const SystemConfig& config, Protocol protocol, double eps_target, Regime regime,
                                    const OptimizerSettings& settings = {});

/// Multi-start search: coarse (n, eta) grid with the best power per cell,
/// then integer pattern search around the leading starts.
OptimizationResult maximize_ee(const SystemConfig& config, Protocol protocol, double eps_threshold, Regime regime,
                               const OptimizerSettings& settings = {});

/// Evaluates a fixed operating point: n_s, n_r, P_S and P_R (P_R ignored by DT).
OptimizationResult evaluate_point(const SystemConfig& config, Protocol protocol, std::int64_t n_s,
                                  std::int64_t n_r, double p_s, double p_r, const OptimizerSettings& settings = {});

}  // namespace fbrelay
