#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "fbrelay/errors.hpp"
#include "fbrelay/fb_kernel.hpp"
#include "support/oracles.hpp"

using namespace fbrelay;

TEST(Capacity, KnownValues) {
  EXPECT_EQ(shannon_capacity(0.0), 0.0);
  EXPECT_DOUBLE_EQ(shannon_capacity(1.0), 1.0);
  EXPECT_DOUBLE_EQ(shannon_capacity(3.0), 2.0);
  EXPECT_THROW(shannon_capacity(-1e-3), std::domain_error);
}

TEST(Dispersion, KnownValues) {
  EXPECT_EQ(channel_dispersion(0.0), 0.0);
  EXPECT_DOUBLE_EQ(channel_dispersion(1.0), 0.75);
  EXPECT_NEAR(channel_dispersion(1e6), 1.0, 1e-5);
  EXPECT_LT(channel_dispersion(1e6), 1.0);
  EXPECT_THROW(channel_dispersion(-2.0), std::domain_error);
}

TEST(CodingSpec, RejectsShortBlocks) {
  EXPECT_THROW(CodingSpec::make(10, 99), ConfigError);
  EXPECT_THROW(CodingSpec::make(0, 500), ConfigError);
  const CodingSpec s = CodingSpec::make(250, 500);
  EXPECT_DOUBLE_EQ(s.rate(), 0.5);
}

TEST(MaxCodingRate, HalfProbabilityIsCapacity) {
  EXPECT_DOUBLE_EQ(max_coding_rate(1.0, 500, 0.5), 1.0);
}

TEST(MaxCodingRate, PenaltyVanishesForLongBlocks) {
  EXPECT_NEAR(max_coding_rate(1.0, 1e14, 1e-3), 1.0, 1e-6);
  EXPECT_LT(max_coding_rate(1.0, 500, 1e-3), 1.0);
}

TEST(MaxCodingRate, RejectsProbabilityOutsideUnitInterval) {
  EXPECT_THROW(max_coding_rate(1.0, 500, 0.0), std::domain_error);
  EXPECT_THROW(max_coding_rate(1.0, 500, 1.0), std::domain_error);
  EXPECT_THROW(max_coding_rate(-1.0, 500, 0.1), std::domain_error);
}

TEST(MaxCodingRate, InvertsAwgnOutageAtReferencePoint) {
  const double r = max_coding_rate(1.0, 500, 1e-3);
  EXPECT_NEAR(awgn_outage(1.0, r, 500), 1e-3, 1e-12);
}

TEST(MaxCodingRate, InvertsAwgnOutageOnRandomGrid) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> log_rho(-1.0, 2.0), log_eps(-6.0, -0.31);
  std::uniform_int_distribution<int> n(100, 5000);
  for (int i = 0; i < 500; ++i) {
    const double rho = std::pow(10.0, log_rho(rng));
    const double eps = std::pow(10.0, log_eps(rng));
    const int len = n(rng);
    const double r = max_coding_rate(rho, len, eps);
    if (r <= 0.0) continue;
    EXPECT_NEAR(awgn_outage(rho, r, len) / eps, 1.0, 1e-9) << rho << " " << len << " " << eps;
  }
}

TEST(AwgnOutage, HalfAtCapacity) {
  for (double rate : {0.2, 0.5, 1.0, 2.0}) {
    for (double n : {100.0, 500.0, 4000.0}) EXPECT_NEAR(awgn_outage(std::exp2(rate) - 1.0, rate, n), 0.5, 1e-12);
  }
}

TEST(AwgnOutage, LimitsInSnr) {
  EXPECT_LT(awgn_outage(1e6, 1.0, 500), 1e-300);
  EXPECT_EQ(awgn_outage(0.0, 1.0, 500), 1.0);
}

TEST(AwgnOutage, MatchesHighPrecisionReference) {
  EXPECT_NEAR(awgn_outage(1.0, CodingSpec{500, 500}), oracle::awgn_outage(1.0, 1.0, 500), 1e-12);
  for (double rho : {0.6, 0.9, 1.1, 1.3, 1.6}) {
    for (double n : {100.0, 500.0, 2000.0}) {
      const double ref = oracle::awgn_outage(rho, 1.0, n);
      EXPECT_NEAR(awgn_outage(rho, 1.0, n) / ref, 1.0, 1e-12) << rho << " " << n;
    }
  }
}

TEST(AwgnOutage, MonotoneInSnrAndBlocklength) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rho(0.01, 20.0), rate(0.1, 3.0);
  std::uniform_int_distribution<int> n(100, 5000);
  for (int i = 0; i < 2000; ++i) {
    const double a = rho(rng), b = rho(rng), r = rate(rng);
    const int n1 = n(rng), n2 = n(rng);
    EXPECT_GE(awgn_outage(std::min(a, b), r, n1), awgn_outage(std::max(a, b), r, n1));
    // Longer blocks help only above the threshold at fixed rate.
    if (shannon_capacity(a) > r) EXPECT_GE(awgn_outage(a, r, std::min(n1, n2)), awgn_outage(a, r, std::max(n1, n2)));
  }
}

TEST(QFunction, KnownValues) {
  EXPECT_EQ(q_function(0.0), 0.5);
  EXPECT_EQ(q_inverse(0.5), 0.0);
  EXPECT_NEAR(q_function(3.090232306167813), 1e-3, 1e-15);
  EXPECT_NEAR(q_function(1.959963984540054), 0.025, 1e-15);
}

TEST(QFunction, MatchesHighPrecisionErfc) {
  for (double t = -10.0; t <= 37.0; t += 0.137) {
    EXPECT_NEAR(q_function(t) / oracle::q(t), 1.0, 1e-12) << t;
  }
}

TEST(QInverse, RejectsEndpoints) {
  EXPECT_THROW(q_inverse(0.0), std::domain_error);
  EXPECT_THROW(q_inverse(1.0), std::domain_error);
  EXPECT_THROW(q_inverse(-0.1), std::domain_error);
}

TEST(QInverse, RoundTripOverEightSigma) {
  double worst = 0.0, worst_t = 0.0;
  for (double t = -8.0; t <= 8.0; t += 0.01) {
    const double gap = std::abs(q_inverse(q_function(t)) - t);
    if (gap > worst) {
      worst = gap;
      worst_t = t;
    }
  }
  EXPECT_LE(worst, 1e-9) << "at t = " << worst_t;
}

TEST(QInverse, RoundTripWhereUpperTailIsResolved) {
  for (double t = -5.0; t <= 8.0; t += 0.01) {
    EXPECT_NEAR(q_inverse(q_function(t)), t, 1e-9) << t;
  }
  // Below -5 Q(t) sits within 1e-7 of 1; check the probability instead.
  for (double t = -8.0; t < -5.0; t += 0.01) {
    const double p = q_function(t);
    EXPECT_NEAR(q_function(q_inverse(p)), p, 2e-16) << t;
  }
}

TEST(Linearization, ParametersAndBreakpoints) {
  const LinearizationParams p = linearize(1.0, 500);
  EXPECT_DOUBLE_EQ(p.theta, 1.0);
  EXPECT_LT(p.varrho, p.theta);
  EXPECT_LT(p.theta, p.vartheta);
  EXPECT_GT(p.mu, 0.0);
  EXPECT_GT(p.zeta, 0.0);
  EXPECT_NEAR(p.vartheta - p.theta, p.theta - p.varrho, 1e-15);
  EXPECT_NEAR(p.vartheta - p.theta, 0.5 / p.mu, 1e-15);
  EXPECT_NEAR(p.mu, oracle::tangent_slope(1.0, 500), 1e-12 * p.mu);
}

TEST(Linearization, SlopeIsTangentOfExactQ) {
  for (double rate : {0.2, 0.5, 1.0, 2.0}) {
    for (double n : {200.0, 500.0, 1000.0}) {
      const double theta = std::exp2(rate) - 1.0;
      const double h = 1e-5 * theta;
      const double numeric = -(awgn_outage(theta + h, rate, n) - awgn_outage(theta - h, rate, n)) / (2 * h);
      EXPECT_NEAR(linearization_slope(rate, n) / numeric, 1.0, 1e-6) << rate << " " << n;
    }
  }
}

TEST(Linearization, NaturalVariantUsesNaturalExponential) {
  const double expected = std::sqrt(500 / (2 * std::numbers::pi)) / std::sqrt(std::exp(2.0) - 1.0);
  EXPECT_NEAR(linearization_slope(1.0, 500, MuVariant::natural_exp), expected, 1e-12);
  EXPECT_NE(linearization_slope(1.0, 500, MuVariant::natural_exp), linearization_slope(1.0, 500));
}

TEST(LinearizedQ, Breakpoints) {
  const LinearizationParams p = linearize(1.0, 500);
  EXPECT_DOUBLE_EQ(linearized_q(p.theta, p), 0.5);
  EXPECT_EQ(linearized_q(p.vartheta, p), 0.0);
  EXPECT_EQ(linearized_q(p.varrho, p), 1.0);
  EXPECT_EQ(linearized_q(0.0, p), 1.0);
  EXPECT_EQ(linearized_q(1e9, p), 0.0);
}

TEST(LinearizedQ, BoundedAndNonincreasing) {
  const LinearizationParams p = linearize(0.7, 300);
  double prev = 1.0;
  for (double t = 0.0; t < 4.0; t += 1e-3) {
    const double k = linearized_q(t, p);
    EXPECT_GE(k, 0.0);
    EXPECT_LE(k, 1.0);
    EXPECT_LE(k, prev);
    prev = k;
  }
}

// Largest pointwise gap between K and Q(g) at R = 1, n = 500. Frozen value.
TEST(LinearizedQ, MaxGapRegressionAtRateOne) {
  const LinearizationParams p = linearize(1.0, 500);
  double worst = 0.0;
  const double w = p.half_width();
  for (double t = p.theta - 3 * w; t <= p.theta + 3 * w; t += w / 2000) {
    worst = std::max(worst, std::abs(linearized_q(t, p) - oracle::awgn_outage(t, 1.0, 500)));
  }
  EXPECT_NEAR(worst, 0.113946, 5e-5);
}

// Integrated |K - Q(g)| against the exponential density, relative to eps.
TEST(LinearizedQ, IntegratedErrorAgainstOutage) {
  for (double rate : {0.2, 1.0}) {
    const double n = 500;
    const LinearizationParams p = linearize(rate, n);
    for (double gamma : {1.0, 10.0, 100.0}) {
      auto f = [&](double t) {
        return std::abs(linearized_q(t, p) - awgn_outage(t, rate, n)) * std::exp(-t / gamma) / gamma;
      };
      const double w = p.half_width();
      std::vector<double> pts{0.0};
      for (double t : {p.theta - 10 * w, p.varrho, p.theta, p.vartheta, p.theta + 10 * w, p.theta + 40 * w}) {
        if (t > pts.back()) pts.push_back(t);
      }
      const double err = oracle::integrate(f, pts);
      const double eps = oracle::exact_link_outage(gamma, rate, n);
      EXPECT_LE(err, 1e-3 * std::max(eps, 1e-6)) << rate << " " << gamma;
    }
  }
}
