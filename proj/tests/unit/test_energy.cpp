#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "fbrelay/energy.hpp"
#include "fbrelay/errors.hpp"

using namespace fbrelay;

namespace {

PowerProfile ideal() {
  PowerProfile p;
  p.p_tx_mw = 1e-300;
  p.p_rx_mw = 1e-300;
  p.drain_efficiency = 1.0;
  return p;
}

SystemConfig config(Protocol p, double db = 20.0, double eta = 0.5) {
  SystemConfig c;
  c.protocol = p;
  c.set_p_total_db(db);
  c.eta = eta;
  return c;
}

}  // namespace

TEST(PowerProfile, Defaults) {
  const PowerProfile p;
  EXPECT_DOUBLE_EQ(p.p_tx(), 0.0979);
  EXPECT_DOUBLE_EQ(p.p_rx(), 0.1122);
  EXPECT_DOUBLE_EQ(p.drain_efficiency, 0.35);
  EXPECT_NO_THROW(p.validate());
  PowerProfile bad;
  bad.drain_efficiency = 1.5;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(SingleHop, UnitCase) { EXPECT_NEAR(energy_single_hop(1.0, 1.0, ideal()), 1.0, 1e-15); }

TEST(SingleHop, RateScaling) {
  const PowerProfile p;
  EXPECT_DOUBLE_EQ(energy_single_hop(0.2, 2.0, p), energy_single_hop(0.2, 1.0, p) / 2.0);
}

TEST(SingleHop, DefaultCircuitConstants) {
  EXPECT_NEAR(energy_single_hop(0.1, 1.0, PowerProfile{}), 0.1 / 0.35 + 0.0979 + 0.1122, 1e-15);
}

TEST(SingleHop, RejectsZeroRate) { EXPECT_THROW(energy_single_hop(0.1, 0.0, PowerProfile{}), std::domain_error); }

TEST(EnergyDf, Interpolates) {
  const PowerProfile p;
  const SystemConfig c = config(Protocol::df);
  const double hop = energy_single_hop(c.p_source() * p.watts_per_unit, c.source_coding().rate(), p);
  EXPECT_NEAR(energy_df(c, p, 1.0), hop, 1e-15);
  EXPECT_NEAR(energy_df(c, p, 0.0), 2.0 * hop, 1e-15);
  EXPECT_NEAR(energy_df(c, p, 0.5), 1.5 * hop, 1e-15);
}

TEST(EnergyDf, AsymmetricPhases) {
  const PowerProfile p;
  const SystemConfig c = config(Protocol::df, 20.0, 0.8);
  const double e1 = (0.08 / 0.35 + p.p_tx() + p.p_rx()) / c.source_coding().rate();
  const double e2 = (0.02 / 0.35 + p.p_tx() + p.p_rx()) / c.relay_coding().rate();
  EXPECT_NEAR(energy_df(c, p, 0.3), 0.3 * e1 + 0.7 * (e1 + e2), 1e-14);
}

TEST(EnergyCombining, BranchIsolation) {
  const PowerProfile p;
  const SystemConfig c = config(Protocol::sc);
  const double r = c.source_coding().rate();
  EXPECT_NEAR(energy_combining(c, p, 1.0), (p.amplifier(c.p_source()) + p.p_tx() + 2 * p.p_rx()) / r, 1e-15);
  EXPECT_NEAR(energy_combining(c, p, 0.0),
              (p.amplifier(c.p_source()) + p.amplifier(c.p_relay()) + 2 * p.p_tx() + 3 * p.p_rx()) / r, 1e-15);
}

TEST(EnergyCombining, ExtraReceiverOverDf) {
  const PowerProfile p;
  for (double eta : {0.3, 0.5, 0.9}) {
    const SystemConfig c = config(Protocol::mrc, 15.0, eta);
    for (double eps : {0.0, 0.01, 0.4, 1.0}) {
      EXPECT_NEAR(energy_combining(c, p, eps) - energy_df(c, p, eps), p.p_rx() / c.source_coding().rate(), 1e-14);
    }
  }
}

TEST(EnergyCombining, RejectsProbabilityOutsideUnitInterval) {
  EXPECT_THROW(energy_combining(config(Protocol::sc), PowerProfile{}, 1.1), std::domain_error);
  EXPECT_THROW(energy_df(config(Protocol::df), PowerProfile{}, -0.1), std::domain_error);
}

TEST(EnergyEfficiency, Values) {
  EXPECT_EQ(energy_efficiency(1.0, 1.0, 3.0), 0.0);
  EXPECT_EQ(energy_efficiency(1.0, 0.0, 1.0), 1.0);
  double prev = 2.0 + 1e-12;
  for (double eps = 0.0; eps <= 1.0; eps += 0.01) {
    const double ee = energy_efficiency(1.0, eps, 0.5);
    EXPECT_LT(ee, prev);
    prev = ee;
  }
  EXPECT_THROW(energy_efficiency(1.0, 0.0, 0.0), std::domain_error);
}

TEST(EvaluateEnergy, BreakdownSumsToTotal) {
  for (Protocol p : {Protocol::dt, Protocol::df, Protocol::sc, Protocol::mrc}) {
    const SystemConfig c = config(p, 20.0, 0.6);
    const EnergyBreakdown b = evaluate_energy(c, PowerProfile{});
    double sum = 0.0;
    for (const EnergyComponent& part : b.components) sum += part.value;
    EXPECT_NEAR(sum, b.e_total, 1e-12 * b.e_total) << to_string(p);
    EXPECT_GT(b.e_total, 0.0);
    const OutageReport r = evaluate_outage(c, Method::closed_form);
    EXPECT_EQ(b.ee, energy_efficiency(c.source_coding().rate(), r.eps_end, b.e_total));
  }
}

TEST(EvaluateEnergy, EpaOrderingAtDefaults) {
  // At the default 20 dB, k = n = 500, equal split.
  std::vector<double> ee;
  for (Protocol p : {Protocol::df, Protocol::sc, Protocol::mrc}) ee.push_back(evaluate_energy(config(p), PowerProfile{}).ee);
  EXPECT_GE(ee[2], ee[1]);
  EXPECT_GT(ee[0], 0.0);
}

TEST(EvaluateEnergy, MonotoneEnergyAndOutageInPower) {
  for (Protocol p : {Protocol::df, Protocol::sc, Protocol::mrc}) {
    double prev_e = 0.0, prev_eps = 1.0;
    for (double db = 0.0; db <= 40.0; db += 1.0) {
      const SystemConfig c = config(p, db);
      const OutageReport r = evaluate_outage(c, Method::closed_form);
      const double e = evaluate_energy(c, PowerProfile{}, r).e_total;
      EXPECT_GT(e, prev_e) << to_string(p) << " " << db;
      EXPECT_LE(r.eps_end, prev_eps) << to_string(p) << " " << db;
      prev_e = e;
      prev_eps = r.eps_end;
    }
  }
}

TEST(EvaluateEnergy, InteriorMaximumOverPower) {
  for (Protocol p : {Protocol::df, Protocol::sc, Protocol::mrc}) {
    std::vector<double> ee;
    for (double db = 0.0; db <= 40.0; db += 0.5) ee.push_back(evaluate_energy(config(p, db), PowerProfile{}).ee);
    const auto best = std::max_element(ee.begin(), ee.end()) - ee.begin();
    EXPECT_GT(best, 0) << to_string(p);
    EXPECT_LT(best, static_cast<long>(ee.size()) - 1) << to_string(p);
  }
}
