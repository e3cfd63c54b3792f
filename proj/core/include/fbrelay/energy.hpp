#pragma once

// Energy per bit and energy efficiency of DT, DF, SC and MRC.
//
// Transmit powers in SystemConfig are SNR-scaled (N0 = 1), so they are
// converted to watts through PowerProfile::watts_per_unit before the
// circuit terms are added. With the default of 1 mW per unit, a 20 dB total
// power is 100 mW.

#include <string>
#include <vector>

#include "fbrelay/channel.hpp"
#include "fbrelay/protocols.hpp"

namespace fbrelay {

struct PowerProfile {
  double p_tx_mw = 97.9;
  double p_rx_mw = 112.2;
  /// Power-amplifier drain efficiency, in (0, 1].
  double drain_efficiency = 0.35;
  /// Watts per unit of SystemConfig transmit power.
  double watts_per_unit = 1e-3;

  double p_tx() const noexcept { return p_tx_mw * 1e-3; }
  double p_rx() const noexcept { return p_rx_mw * 1e-3; }
  /// Amplifier draw in watts for a transmit power given in config units.
  double amplifier(double power_units) const noexcept { return power_units * watts_per_unit / drain_efficiency; }

  void validate() const;
};

struct EnergyComponent {
  std::string label;
  double value = 0.0;
};

struct EnergyBreakdown {
  double e_total = 0.0;
  double ee = 0.0;
  std::vector<EnergyComponent> components;
};

/// (P/phi + P_TX + P_RX) / rate with P in watts.
double energy_single_hop(double p_watts, double rate, const PowerProfile& profile);

/// Each phase is charged at its own rate k/n_i and amplifier draw P_i/phi;
/// with n_s == n_r this is eps_SR E_1 + (1 - eps_SR)(E_1 + E_2).
double energy_df(const SystemConfig& config, const PowerProfile& profile, double eps_sr);

/// As energy_df with one extra receiver (the destination listens to the
/// source) in every phase.
double energy_combining(const SystemConfig& config, const PowerProfile& profile, double eps_sr);

double energy_efficiency(double rate, double eps_end, double e_total);

/// Energy per bit of `config.protocol` given the S-R outage (ignored by DT).
double protocol_energy(const SystemConfig& config, const PowerProfile& profile, double eps_sr);

/// Evaluates the outage with `method` and returns the full breakdown.
EnergyBreakdown evaluate_energy(const SystemConfig& config, const PowerProfile& profile,
                                Method method = Method::closed_form);
EnergyBreakdown evaluate_energy(const SystemConfig& config, const PowerProfile& profile, const OutageReport& outage);

}  // namespace fbrelay
