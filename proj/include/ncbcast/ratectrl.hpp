#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ncbcast/linalg.hpp"
#include "ncbcast/random.hpp"

namespace ncbcast {

enum class RateScheme { baseline, delay_threshold, dynamic };

std::string_view to_string(RateScheme scheme);
/// Accepts "baseline", "threshold", "dynamic". Throws std::invalid_argument.
RateScheme parse_rate_scheme(std::string_view text);

inline constexpr double kDefaultEpsilon = 1e-4;

struct RateControlParams {
  RateScheme scheme = RateScheme::baseline;
  double lambda = 0.5;                 // baseline addition rate
  std::uint64_t threshold_slots = 10;  // T_D
  double weight = 10.0;                // f
  double epsilon = kDefaultEpsilon;

  /// Throws std::invalid_argument when a parameter is out of range for the
  /// selected scheme.
  void validate(double mu) const;
};

struct QueuedPacket {
  PacketIndex index = 0;
  std::uint64_t age = 0;  // slots since it entered the queue
};

/// Sender-side view of the receivers at the start of a slot.
struct FeedbackSnapshot {
  std::vector<std::uint64_t> undelivered;    // u(r)
  std::vector<std::uint64_t> markov_states;  // s_r
  std::vector<PacketIndex> delivered_prefix;
  std::vector<QueuedPacket> queue;  // oldest first
  double mu = 1.0;
};

struct ThresholdDecision {
  bool add = false;
  /// Set in stop mode: transmit this packet uncoded.
  std::optional<PacketIndex> uncoded;
};

bool decide_baseline(double lambda, RandomStream& rng);

/// Start/stop rule: stop (wait, resend the oldest expired packet uncoded)
/// while any queued packet is older than T_D; otherwise add iff some
/// receiver holds every queued packet.
ThresholdDecision decide_delay_threshold(std::uint64_t threshold_slots,
                                         const FeedbackSnapshot& snapshot);

/// min(A(t)/t, mu - epsilon), and 0 before the first slot.
double lambda_est(std::uint64_t added, std::uint64_t slots, double mu,
                  double epsilon = kDefaultEpsilon);

/// M = R f - sum_r u(r) / (mu - lambda_est). Add iff M > 0.
double decision_metric(std::span<const std::uint64_t> undelivered, double weight, double mu,
                       double lambda_estimate);

/// T_U = R f (mu - lambda_est): add iff sum_r u(r) < T_U.
double undelivered_threshold(double lambda_estimate, double weight, std::size_t receivers,
                             double mu);

/// E_k = k / (mu - lambda). Throws std::domain_error unless lambda < mu.
double expected_time_to_zero(std::uint64_t k, double lambda, double mu);

struct Benefits {
  double add = 0.0;   // B_A
  double wait = 0.0;  // B_W
};

/// Per-receiver benefit of adding vs. waiting for a receiver in Markov
/// state k with u undelivered packets.
Benefits benefits(std::uint64_t k, std::uint64_t undelivered, double weight, double lambda,
                  double mu);

struct RateDecision {
  bool add = false;
  std::optional<PacketIndex> uncoded;
  double lambda_estimate = 0.0;  // dynamic only
  double metric = 0.0;           // dynamic only
  bool threshold_agrees = true;  // dynamic only: sign(M) vs. sum u < T_U
};

/// Owns the per-run state of the rate-control block.
class RateController {
 public:
  RateController(RateControlParams params, std::size_t receivers, double mu,
                 std::uint64_t seed);

  /// Decision for the next slot; records the add in A(t).
  RateDecision decide(const FeedbackSnapshot& snapshot);

  const RateControlParams& params() const { return params_; }
  std::uint64_t added() const { return added_; }
  std::uint64_t slots() const { return slots_; }

 private:
  RateControlParams params_;
  std::size_t receivers_;
  double mu_;
  RandomStream rng_;
  std::uint64_t added_ = 0;
  std::uint64_t slots_ = 0;
};

}  // namespace ncbcast
