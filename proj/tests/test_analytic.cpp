#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ncbcast/analytic.hpp"

using namespace ncbcast;

namespace {

// First-return probability by brute force over every walk of T - 1 steps
// after the initial up move.
double enumerate_cycle(double p, double q, unsigned T) {
  if (T == 1) return 1.0 - p;
  double total = 0.0;
  unsigned long combos = 1;
  for (unsigned i = 1; i < T; ++i) combos *= 3;
  for (unsigned long code = 0; code < combos; ++code) {
    unsigned long c = code;
    long state = 1;
    double prob = p;
    bool ok = true;
    for (unsigned step = 1; step < T && ok; ++step) {
      switch (c % 3) {
        case 0: ++state; prob *= p; break;
        case 1: --state; prob *= q; break;
        default: prob *= 1.0 - p - q; break;
      }
      c /= 3;
      const bool last = step + 1 == T;
      ok = last ? state == 0 : state > 0;
    }
    if (ok) total += prob;
  }
  return total;
}

}  // namespace

TEST(Analytic, Stationary) {
  const ChainParams c{0.7, 0.8};
  EXPECT_NEAR(stationary(c, 0), 5.0 / 12.0, 1e-12);
  EXPECT_NEAR(stationary(c, 1), 5.0 / 12.0 * 7.0 / 12.0, 1e-12);
  double sum = 0.0;
  for (std::uint64_t k = 0; k < 400; ++k) sum += stationary(c, k);
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_LT(stationary(c, 2000), 1e-300);
  EXPECT_NEAR(stationary_tail(c, 3), std::pow(7.0 / 12.0, 3), 1e-12);
  EXPECT_THROW(stationary(ChainParams{0.8, 0.8}, 0), std::domain_error);
}

TEST(Analytic, CycleProbabilityExamples) {
  const ChainParams c{0.7, 0.8};
  EXPECT_NEAR(cycle_probability(c, 1), 0.86, 1e-12);
  EXPECT_NEAR(cycle_probability(c, 2), 0.0336, 1e-12);
  EXPECT_NEAR(cycle_probability(c, 3), 0.14 * 0.24 * 0.62, 1e-12);
  EXPECT_THROW(cycle_probability(c, 0), std::invalid_argument);
}

TEST(Analytic, CycleProbabilityMatchesWalkEnumeration) {
  for (double lambda : {0.2, 0.5, 0.7}) {
    for (double mu : {0.6, 0.8, 1.0}) {
      const ChainParams c{lambda, mu};
      const auto all = cycle_probabilities(c, 12);
      for (unsigned T = 1; T <= 12; ++T) {
        const double want = enumerate_cycle(c.p(), c.q(), T);
        EXPECT_NEAR(cycle_probability(c, T), want, 1e-12) << lambda << " " << mu << " T=" << T;
        EXPECT_NEAR(all[T - 1], want, 1e-12);
      }
    }
  }
}

TEST(Analytic, CycleMassConverges) {
  EXPECT_GE(expected_cycle_mass(ChainParams{0.3, 0.8}, 200), 0.999);
  EXPECT_NEAR(expected_cycle_mass(ChainParams{0.7, 0.8}, 1), 0.86, 1e-12);
  const ChainParams heavy{0.7, 0.8};
  double prev = 0.0;
  for (std::uint64_t T : {10u, 100u, 1000u, 5000u}) {
    const double m = expected_cycle_mass(heavy, T);
    EXPECT_GE(m, prev);
    EXPECT_LE(m, 1.0 + 1e-12);
    prev = m;
  }
  EXPECT_GE(prev, 0.999);
}

TEST(Analytic, ZeroStateDelay) {
  const ChainParams c{0.5, 0.8};
  const double printed = zero_state_delay_estimate(c);
  const double consistent = zero_state_delay_estimate(c, 1000, DelayDenominator::consistent);
  EXPECT_TRUE(std::isfinite(printed));
  EXPECT_GT(printed, 0.0);
  EXPECT_GT(consistent, printed);

  // Truncation at 1000 is already converged for rho = 0.875.
  const ChainParams near{0.7, 0.8};
  for (auto v : {DelayDenominator::as_printed, DelayDenominator::consistent}) {
    const double a = zero_state_delay_estimate(near, 1000, v);
    const double b = zero_state_delay_estimate(near, 5000, v);
    EXPECT_LT(std::abs(a - b) / b, 1e-3);
  }

  // Light load: most cycles are single slots and the estimate is small.
  EXPECT_LT(zero_state_delay_estimate(ChainParams{1e-4, 0.8}), 0.01);

  EXPECT_THROW(zero_state_delay_estimate(ChainParams{0.8, 0.8}), std::domain_error);
  EXPECT_THROW(zero_state_delay_estimate(c, 1), std::invalid_argument);
}

TEST(Analytic, LeaderStateModel) {
  const ChainParams c{0.7, 0.8};
  EXPECT_NEAR(leader_state_model(c, 4, 0), 1.0 - std::pow(7.0 / 12.0, 4), 1e-12);
  EXPECT_NEAR(leader_state_model(c, 4, 0), 0.8842, 5e-5);
  for (std::uint64_t k = 0; k < 10; ++k) {
    EXPECT_NEAR(leader_state_model(c, 1, k), stationary(c, k), 1e-15);
  }
  double sum = 0.0;
  for (std::uint64_t k = 0; k < 200; ++k) sum += leader_state_model(c, 8, k);
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Analytic, RlncDeliveryProbability) {
  for (unsigned M : {2u, 4u, 16u, 256u}) EXPECT_DOUBLE_EQ(rlnc_delivery_probability(M, 1), 1.0);
  EXPECT_NEAR(rlnc_delivery_probability(4, 2), 0.2, 1e-15);
  EXPECT_NEAR(rlnc_delivery_probability(2, 3), 1.0 / 7.0, 1e-15);
  EXPECT_THROW(rlnc_delivery_probability(1, 2), std::invalid_argument);
  EXPECT_THROW(rlnc_delivery_probability(2, 0), std::invalid_argument);
}
