#include "ncbcast/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace ncbcast {

namespace {

// log n! for n <= limit, built once per call site.
std::vector<double> log_factorials(std::uint64_t limit) {
  std::vector<double> out(limit + 1, 0.0);
  for (std::uint64_t n = 2; n <= limit; ++n) out[n] = out[n - 1] + std::log(static_cast<double>(n));
  return out;
}

double log_choose(const std::vector<double>& lf, std::uint64_t n, std::uint64_t k) {
  return lf[n] - lf[k] - lf[n - k];
}

// P(T) for T >= 2: walks that step up once, return to 0 for the first time
// after T slots and contain k up/down pairs. Dyck paths of length 2k - 2
// shape the interior (Catalan), pauses fill the remaining T - 2k slots.
double cycle_term_sum(const ChainParams& c, std::uint64_t T, const std::vector<double>& lf) {
  const double p = c.p();
  const double q = c.q();
  const double r = 1.0 - p - q;
  if (p <= 0.0 || q <= 0.0) return 0.0;
  const double lp = std::log(p);
  const double lq = std::log(q);
  const double lr = r > 0.0 ? std::log(r) : 0.0;

  double total = 0.0;
  for (std::uint64_t k = 1; k <= T / 2; ++k) {
    const std::uint64_t pauses = T - 2 * k;
    if (pauses > 0 && r <= 0.0) continue;
    const double log_term = -std::log(static_cast<double>(k)) + log_choose(lf, 2 * k - 2, k - 1) +
                            log_choose(lf, T - 2, 2 * k - 2) + static_cast<double>(k) * (lp + lq) +
                            static_cast<double>(pauses) * lr;
    total += std::exp(log_term);
  }
  return total;
}

}  // namespace

void ChainParams::require_stable() const {
  if (!(lambda < mu)) throw std::domain_error("lambda must be below mu for a stationary chain");
}

double stationary(const ChainParams& c, std::uint64_t k) {
  c.require_stable();
  const double ratio = c.p() / c.q();
  return (1.0 - ratio) * std::pow(ratio, static_cast<double>(k));
}

double stationary_tail(const ChainParams& c, std::uint64_t k) {
  c.require_stable();
  return std::pow(c.p() / c.q(), static_cast<double>(k));
}

double cycle_probability(const ChainParams& c, std::uint64_t T) {
  if (T == 0) throw std::invalid_argument("cycle length must be at least 1");
  if (T == 1) return 1.0 - c.p();
  return cycle_term_sum(c, T, log_factorials(T));
}

std::vector<double> cycle_probabilities(const ChainParams& c, std::uint64_t T_max) {
  std::vector<double> out;
  if (T_max == 0) return out;
  out.reserve(T_max);
  out.push_back(1.0 - c.p());
  const auto lf = log_factorials(T_max);
  for (std::uint64_t T = 2; T <= T_max; ++T) out.push_back(cycle_term_sum(c, T, lf));
  return out;
}

double expected_cycle_mass(const ChainParams& c, std::uint64_t T_max) {
  double total = 0.0;
  for (double v : cycle_probabilities(c, T_max)) total += v;
  return total;
}

double zero_state_delay_estimate(const ChainParams& c, std::uint64_t T_max,
                                 DelayDenominator variant) {
  c.require_stable();
  if (T_max < 2) throw std::invalid_argument("T_max must be at least 2");
  const auto P = cycle_probabilities(c, T_max);
  const double lambda = c.lambda;

  double numerator = 0.0;
  double extra_packets = 0.0;
  double long_cycles = 0.0;
  for (std::uint64_t T = 2; T <= T_max; ++T) {
    const double pt = P[T - 1];
    const double td = static_cast<double>(T);
    numerator += pt * (td + 0.5 * lambda * td * (td - 2.0));
    extra_packets += pt * lambda * (td - 2.0);
    long_cycles += pt;
  }
  const double base = variant == DelayDenominator::as_printed ? 1.0 : long_cycles;
  return numerator / (lambda * c.mu + base + extra_packets);
}

double leader_state_model(const ChainParams& c, unsigned receivers, std::uint64_t k) {
  c.require_stable();
  if (receivers < 1) throw std::invalid_argument("need at least one receiver");
  const double ratio_r = std::pow(c.p() / c.q(), static_cast<double>(receivers));
  return (1.0 - ratio_r) * std::pow(ratio_r, static_cast<double>(k));
}

double rlnc_delivery_probability(unsigned field_size, std::uint64_t s_star) {
  if (field_size < 2) throw std::invalid_argument("field size must be at least 2");
  if (s_star < 1) throw std::invalid_argument("effective state must be at least 1");
  const double m = static_cast<double>(field_size);
  return (m - 1.0) / (std::pow(m, static_cast<double>(s_star)) - 1.0);
}

}  // namespace ncbcast
