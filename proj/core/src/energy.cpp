#include "fbrelay/energy.hpp"

#include <cmath>
#include <stdexcept>

#include "fbrelay/errors.hpp"

namespace fbrelay {

void PowerProfile::validate() const {
  if (!(p_tx_mw > 0.0) || !(p_rx_mw > 0.0)) throw ConfigError("circuit powers must be positive");
  if (!(drain_efficiency > 0.0 && drain_efficiency <= 1.0)) throw ConfigError("drain efficiency must be in (0, 1]");
  if (!(watts_per_unit > 0.0)) throw ConfigError("watts_per_unit must be positive");
}

double energy_single_hop(double p_watts, double rate, const PowerProfile& profile) {
  if (!(rate > 0.0)) throw std::domain_error("energy_single_hop: rate must be positive");
  if (p_watts < 0.0) throw std::domain_error("energy_single_hop: negative power");
  return (p_watts / profile.drain_efficiency + profile.p_tx() + profile.p_rx()) / rate;
}

namespace {

struct PhaseCosts {
  double first;   // S broadcast only
  double second;  // relay forwarding
};

PhaseCosts phase_costs(const SystemConfig& config, const PowerProfile& profile, int receivers_first,
                       int receivers_second) {
  const double r1 = config.source_coding().rate();
  const double r2 = config.relay_coding().rate();
  if (!(r1 > 0.0) || !(r2 > 0.0)) throw std::domain_error("phase rate must be positive");
  const double first = (profile.amplifier(config.p_source()) + profile.p_tx() + receivers_first * profile.p_rx()) / r1;
  const double second =
      (profile.amplifier(config.p_relay()) + profile.p_tx() + receivers_second * profile.p_rx()) / r2;
  return {first, second};
}

void check_probability(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::domain_error("S-R outage must lie in [0, 1]");
}

}  // namespace

double energy_df(const SystemConfig& config, const PowerProfile& profile, double eps_sr) {
  check_probability(eps_sr);
  const PhaseCosts c = phase_costs(config, profile, 1, 1);
  return eps_sr * c.first + (1.0 - eps_sr) * (c.first + c.second);
}

double energy_combining(const SystemConfig& config, const PowerProfile& profile, double eps_sr) {
  check_probability(eps_sr);
  const PhaseCosts c = phase_costs(config, profile, 2, 1);
  return eps_sr * c.first + (1.0 - eps_sr) * (c.first + c.second);
}

double energy_efficiency(double rate, double eps_end, double e_total) {
  if (!(e_total > 0.0)) throw std::domain_error("energy_efficiency: energy must be positive");
  return rate * (1.0 - eps_end) / e_total;
}

double protocol_energy(const SystemConfig& config, const PowerProfile& profile, double eps_sr) {
  switch (config.protocol) {
    case Protocol::dt:
      return energy_single_hop(config.p_total * profile.watts_per_unit, config.source_coding().rate(), profile);
    case Protocol::df:
      return energy_df(config, profile, eps_sr);
    case Protocol::sc:
    case Protocol::mrc:
      return energy_combining(config, profile, eps_sr);
  }
  return 0.0;
}

EnergyBreakdown evaluate_energy(const SystemConfig& config, const PowerProfile& profile, const OutageReport& outage) {
  EnergyBreakdown b;
  const double r1 = config.source_coding().rate();
  if (config.protocol == Protocol::dt) {
    b.e_total = protocol_energy(config, profile, 0.0);
    b.components = {{"amplifier", profile.amplifier(config.p_total) / r1},
                    {"tx", profile.p_tx() / r1},
                    {"rx", profile.p_rx() / r1}};
  } else {
    const double eps_sr = outage.eps_sr;
    const double r2 = config.relay_coding().rate();
    const double relay_active = 1.0 - eps_sr;
    const int rx_first = config.protocol == Protocol::df ? 1 : 2;
    b.e_total = protocol_energy(config, profile, eps_sr);
    b.components = {{"phase1.amplifier", profile.amplifier(config.p_source()) / r1},
                    {"phase1.tx", profile.p_tx() / r1},
                    {"phase1.rx", rx_first * profile.p_rx() / r1},
                    {"phase2.amplifier", relay_active * profile.amplifier(config.p_relay()) / r2},
                    {"phase2.tx", relay_active * profile.p_tx() / r2},
                    {"phase2.rx", relay_active * profile.p_rx() / r2}};
  }
  b.ee = energy_efficiency(r1, outage.eps_end, b.e_total);
  return b;
}

EnergyBreakdown evaluate_energy(const SystemConfig& config, const PowerProfile& profile, Method method) {
  return evaluate_energy(config, profile, evaluate_outage(config, method));
}

}  // namespace fbrelay
