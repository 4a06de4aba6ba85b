#pragma once

#include <cstdint>
#include <vector>

namespace ncbcast {

/// Single-receiver birth-death chain under the baseline scheme.
struct ChainParams {
  double lambda = 0.0;
  double mu = 1.0;

  double p() const { return lambda * (1.0 - mu); }  // up
  double q() const { return (1.0 - lambda) * mu; }  // down
  double rho() const { return lambda / mu; }
  /// Throws std::domain_error unless lambda < mu (positive recurrence).
  void require_stable() const;
};

/// S(k) = (1 - p/q)(p/q)^k
double stationary(const ChainParams& c, std::uint64_t k);
/// P(state >= k) = (p/q)^k
double stationary_tail(const ChainParams& c, std::uint64_t k);

/// Probability that a delivery cycle (first return to state 0) lasts T slots.
/// Throws std::invalid_argument for T = 0.
double cycle_probability(const ChainParams& c, std::uint64_t T);

/// P(1), ..., P(T_max) in one pass; element T - 1 holds P(T).
std::vector<double> cycle_probabilities(const ChainParams& c, std::uint64_t T_max);

/// sum_{T=1}^{T_max} P(T)
double expected_cycle_mass(const ChainParams& c, std::uint64_t T_max);

enum class DelayDenominator {
  /// lambda mu + 1 + sum P(T) lambda (T - 2)
  as_printed,
  /// lambda mu + sum_{T>=2} P(T) (1 + lambda (T - 2)): packets per cycle
  /// counted the same way as in the numerator.
  consistent,
};

/// Mean delay when packets are only delivered on returns to state 0,
/// truncated at T_max. Throws std::domain_error unless lambda < mu and
/// std::invalid_argument for T_max < 2.
double zero_state_delay_estimate(const ChainParams& c, std::uint64_t T_max = 1000,
                                 DelayDenominator variant = DelayDenominator::as_printed);

/// Probability that the best of R independent receivers is in state k:
/// (1 - (p/q)^R) (p/q)^(R k).
double leader_state_model(const ChainParams& c, unsigned receivers, std::uint64_t k);

/// Chance that an innovative RLNC combination lets a receiver with
/// effective state s* deliver its next packet: (M - 1) / (M^s* - 1).
double rlnc_delivery_probability(unsigned field_size, std::uint64_t s_star);

}  // namespace ncbcast
