#include <cmath>

#include <gtest/gtest.h>

#include "fbrelay/errors.hpp"
#include "fbrelay/montecarlo.hpp"
#include "fbrelay/protocols.hpp"

using namespace fbrelay;

namespace {

SystemConfig config(Protocol p, double db = 20.0, double eta = 0.5, std::int64_t k = 500, std::int64_t n = 500) {
  SystemConfig c;
  c.protocol = p;
  c.set_p_total_db(db);
  c.eta = eta;
  c.k = k;
  c.n_s = c.n_r = n;
  return c;
}

McSettings settings(std::uint64_t frames, std::uint64_t seed = 1, unsigned workers = 1) {
  McSettings s;
  s.frames = frames;
  s.seed = seed;
  s.workers = workers;
  return s;
}

}  // namespace

TEST(McSettings, Validation) {
  EXPECT_THROW(settings(0).validate(), ConfigError);
  EXPECT_THROW(settings(9'999).validate(), ConfigError);
  EXPECT_NO_THROW(settings(10'000).validate());
  McSettings s = settings(10'000);
  s.workers = 0;
  EXPECT_THROW(s.validate(), ConfigError);
  EXPECT_THROW(simulate_protocol(config(Protocol::dt), settings(0)), ConfigError);
}

TEST(McEstimate, BinomialInterval) {
  const McEstimate e = McEstimate::from_counts(25, 10'000);
  EXPECT_DOUBLE_EQ(e.mean, 0.0025);
  EXPECT_DOUBLE_EQ(e.standard_error, std::sqrt(0.0025 * 0.9975 / 10'000));
  EXPECT_DOUBLE_EQ(e.ci95_low, 0.0025 - 1.96 * e.standard_error);
  const McEstimate zero = McEstimate::from_counts(0, 10'000);
  EXPECT_EQ(zero.ci95_low, 0.0);
  EXPECT_EQ(zero.ci95_high, 0.0);
  const McEstimate one = McEstimate::from_counts(3, 10'000);
  EXPECT_GE(one.ci95_low, 0.0);
  EXPECT_LE(one.ci95_high, 1.0);
}

TEST(Simulation, HighSnrNeverFails) {
  for (Protocol p : {Protocol::dt, Protocol::df, Protocol::sc, Protocol::mrc}) {
    EXPECT_EQ(simulate_protocol(config(p, 140.0), settings(100'000)).mean, 0.0) << to_string(p);
  }
}

TEST(Simulation, IndependentOfWorkerCount) {
  for (Protocol p : {Protocol::df, Protocol::mrc}) {
    const SystemConfig c = config(p, 10.0, 0.6, 250, 500);
    const McResult a = simulate(c, settings(1'000'003, 9, 1));
    const McResult b = simulate(c, settings(1'000'003, 9, 4));
    const McResult d = simulate(c, settings(1'000'003, 9, 3));
    EXPECT_EQ(a.end_to_end.failures, b.end_to_end.failures);
    EXPECT_EQ(a.end_to_end.failures, d.end_to_end.failures);
    EXPECT_EQ(a.sr.failures, b.sr.failures);
    EXPECT_EQ(a.srd.failures, d.srd.failures);
    EXPECT_EQ(a.end_to_end.mean, b.end_to_end.mean);
  }
}

TEST(Simulation, SeedChangesSample) {
  const SystemConfig c = config(Protocol::dt, 5.0);
  EXPECT_NE(simulate_protocol(c, settings(100'000, 1)).failures, simulate_protocol(c, settings(100'000, 2)).failures);
}

TEST(Simulation, DtMatchesAnalyticAtTenMillionFrames) {
  const SystemConfig c = config(Protocol::dt);
  const McEstimate e = simulate_protocol(c, settings(10'000'000, 3));
  const double analytic = evaluate_outage(c, Method::integral).eps_end;
  EXPECT_TRUE(e.contains(analytic)) << e.ci95_low << " " << analytic << " " << e.ci95_high;
  EXPECT_LE(std::abs(e.mean - analytic), 3 * e.standard_error);
  EXPECT_EQ(e.frames_used, 10'000'000u);
}

TEST(Simulation, MrcNearReferenceOptimum) {
  // Reference operating point: about 0.1% at this split.
  const McEstimate e = simulate_protocol(config(Protocol::mrc, 20.0, 0.7, 250, 500), settings(10'000'000, 4));
  EXPECT_GT(e.mean, 1e-3 / 3);
  EXPECT_LT(e.mean, 1e-3 * 3);
}

TEST(Simulation, ConvergesToIntegralForEveryProtocol) {
  for (Protocol p : {Protocol::dt, Protocol::df, Protocol::sc, Protocol::mrc}) {
    const SystemConfig c = config(p, 10.0, 0.6, 250, 500);
    const McResult r = simulate(c, settings(10'000'000, 5));
    const OutageReport a = evaluate_outage(c, Method::integral);
    EXPECT_LE(std::abs(r.end_to_end.mean - a.eps_end), 3 * r.end_to_end.standard_error) << to_string(p);
    if (p != Protocol::dt) EXPECT_LE(std::abs(r.sr.mean - a.eps_sr), 3 * r.sr.standard_error) << to_string(p);
    if (p == Protocol::mrc) EXPECT_LE(std::abs(r.srd.mean - a.eps_srd), 3 * r.srd.standard_error);
  }
}

TEST(Simulation, CoverageOverIndependentSeeds) {
  const SystemConfig c = config(Protocol::sc, 10.0, 0.6, 250, 500);
  const double analytic = evaluate_outage(c, Method::integral).eps_end;
  int covered = 0;
  for (std::uint64_t seed = 1000; seed < 1100; ++seed) covered += simulate_protocol(c, settings(20'000, seed)).contains(analytic);
  EXPECT_GE(covered, 90);
}

TEST(Simulation, HardThresholdMatchesCapacityOutage) {
  // Hard decisions estimate Pr[log2(1 + gamma E) < R] = 1 - exp(-(2^R - 1)/gamma).
  McSettings s = settings(2'000'000, 6);
  s.decode_rule = DecodeRule::hard_threshold;
  const SystemConfig c = config(Protocol::dt, 10.0);
  const McEstimate e = simulate_protocol(c, s);
  const double expected = -std::expm1(-1.0 / c.p_total);
  EXPECT_LE(std::abs(e.mean - expected), 3 * e.standard_error);
}

TEST(Simulation, ReportCarriesPerLinkEstimates) {
  const SystemConfig c = config(Protocol::mrc, 10.0, 0.6, 250, 500);
  const OutageReport r = simulate_report(c, settings(200'000, 8));
  EXPECT_EQ(r.method, Method::monte_carlo);
  EXPECT_FALSE(std::isnan(r.eps_sd));
  EXPECT_FALSE(std::isnan(r.eps_srd));
  EXPECT_EQ(simulate_report(config(Protocol::df), settings(20'000)).protocol, Protocol::df);
}

TEST(LinkDecoder, BandIsConsistentWithQ) {
  const LinkDecoder d(0.5, 500, DecodeRule::outage_probability);
  EXPECT_LT(d.always_fail_below(), std::exp2(0.5) - 1.0);
  EXPECT_GT(d.never_fail_above(), std::exp2(0.5) - 1.0);
  EXPECT_LE(awgn_outage(d.never_fail_above() * (1 + 1e-9), 0.5, 500), 0x1.0p-54);
  EXPECT_GE(awgn_outage(d.always_fail_below() * (1 - 1e-9), 0.5, 500), 1.0 - 0x1.0p-54);
  EXPECT_TRUE(d.fails(0.0, 0.999));
  EXPECT_FALSE(d.fails(1e3, 1e-16));
}

TEST(DecodeRule, Parsing) {
  EXPECT_EQ(parse_decode_rule("hard-threshold"), DecodeRule::hard_threshold);
  EXPECT_EQ(parse_decode_rule("Outage_Probability"), DecodeRule::outage_probability);
  EXPECT_THROW(parse_decode_rule("soft"), ConfigError);
}
