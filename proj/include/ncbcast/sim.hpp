#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ncbcast/coding.hpp"
#include "ncbcast/gf.hpp"
#include "ncbcast/linalg.hpp"
#include "ncbcast/random.hpp"
#include "ncbcast/ratectrl.hpp"

namespace ncbcast {

/// Which delivery events are stamped. Knowledge spaces evolve identically in
/// every mode; only the delivery bookkeeping changes.
enum class DeliveryMode { full, zero_state_only, zero_and_leader_only };

std::string_view to_string(DeliveryMode mode);
/// Accepts "full", "zero", "zero-leader".
DeliveryMode parse_delivery_mode(std::string_view text);

struct SimConfig {
  unsigned receivers = 4;
  double mu = 0.8;
  CodingScheme coding = CodingScheme::scheme_b;
  RateControlParams rate;
  /// 0 picks the smallest field with at least `receivers` elements.
  unsigned field_exponent = 0;
  std::uint64_t horizon = 100'000;
  std::uint64_t seed = 1;
  DeliveryMode delivery_mode = DeliveryMode::full;
  /// Keep the per-slot lambda_est series (dynamic scheme only).
  bool record_lambda_series = true;

  unsigned resolved_field_exponent() const;
  /// Throws std::invalid_argument on an unusable configuration.
  void validate() const;
};

enum class DeliveryClass : std::uint8_t { zero_state, leader_state, coefficient_based };

std::string_view to_string(DeliveryClass c);

/// Classification of a delivery by receiver `r`. `pre_states` are the
/// Markov states after this slot's addition and before reception.
/// Leader-state delivery is a property of schemes A and B only; under RLNC a
/// non-zero-state delivery is always coefficient based.
DeliveryClass classify_delivery(std::size_t r, std::span<const std::uint64_t> pre_states,
                                std::uint64_t post_state, CodingScheme scheme);

struct DeliveryEvent {
  std::size_t receiver = 0;
  PacketIndex first = 0;  // packets first..last were delivered this slot
  PacketIndex last = 0;
  DeliveryClass kind = DeliveryClass::zero_state;
};

struct SlotTrace {
  std::uint64_t slot = 0;
  bool added = false;
  bool uncoded_directive = false;
  bool idle = false;
  CodedVector vector;
  std::vector<bool> received;
  std::vector<std::uint64_t> markov_states;  // end of slot
  std::vector<DeliveryEvent> deliveries;     // actual decoding progress
  std::size_t coded_packet_count = 0;
  std::size_t effective_list_size = 0;
};

struct Violations {
  std::uint64_t innovation = 0;         // reception not innovative for an incomplete receiver
  std::uint64_t lemma2 = 0;             // coefficient delivery without s* dropping by one
  std::uint64_t markov_mismatch = 0;    // incremental vs. recomputed s_r
  std::uint64_t prefix_regression = 0;  // delivered_prefix went backwards
  std::uint64_t zero_state = 0;         // s_r = 0 but queue not fully delivered
  std::uint64_t leader_flush = 0;       // leader reception left undelivered knowledge (A/B)
  std::uint64_t dynamic_metric = 0;     // sign(M) disagreed with sum u < T_U

  std::uint64_t total() const {
    return innovation + lemma2 + markov_mismatch + prefix_regression + zero_state +
           leader_flush + dynamic_metric;
  }
};

/// Aggregated statistics of one run. Histograms are indexed by value and
/// grow on demand.
struct Metrics {
  unsigned receivers = 0;
  std::uint64_t slots = 0;
  std::uint64_t added = 0;
  std::uint64_t transmissions = 0;  // non-idle slots
  std::uint64_t uncoded_directives = 0;

  std::uint64_t delivered = 0;  // stamped (packet, receiver) pairs
  double delay_sum = 0.0;

  std::vector<std::uint64_t> state_occupancy;   // receiver-slots by s_r at slot end
  std::vector<std::uint64_t> leader_occupancy;  // slots by min_r s_r at slot end
  std::vector<std::uint64_t> coded_count;       // transmissions by nonzero count
  std::vector<std::uint64_t> cycle_length;      // returns to state 0 by cycle length

  std::array<std::uint64_t, 3> delivery_events{};  // by DeliveryClass
  std::array<std::uint64_t, 3> delivered_packets{};

  /// Coefficient-delivery accounting keyed by effective Markov state s*.
  std::vector<std::uint64_t> deliverable_slots;
  std::vector<std::uint64_t> coefficient_deliveries;

  /// Joint one-slot moves of receivers 0 and 1: [ds0 + 1][ds1 + 1].
  std::array<std::array<std::uint64_t, 3>, 3> joint_moves{};

  std::vector<double> lambda_est;  // dynamic scheme, one entry per slot

  std::uint64_t rlnc_draws = 0;
  std::uint64_t rlnc_max_draws = 0;

  Violations violations;

  double throughput() const;
  double mean_delay() const;
  double added_rate() const;
  /// Fraction of transmissions with exactly one nonzero coefficient.
  double uncoded_fraction() const;
  std::uint64_t opposite_moves() const { return joint_moves[2][0] + joint_moves[0][2]; }
};

struct ProfilePoint {
  std::uint64_t s_star = 0;
  std::uint64_t deliverable = 0;
  std::uint64_t delivered = 0;
  double probability = 0.0;
};

/// Normalised coefficient-based delivery probability for every s* with at
/// least one deliverable slot.
std::vector<ProfilePoint> coefficient_delivery_profile(const Metrics& metrics);

/// The slot-by-slot engine: rate control, queue, coding, erasure channels and
/// perfect feedback.
class Simulator {
 public:
  explicit Simulator(const SimConfig& config);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Runs one slot. Fills `trace` when given.
  void step(SlotTrace* trace = nullptr);

  std::uint64_t slot() const;
  const Metrics& metrics() const;
  std::span<const KnowledgeSpace> receivers() const;
  std::span<const PacketIndex> queue() const;
  PacketIndex newest() const;

 private:
  struct World;
  std::unique_ptr<World> world_;
};

using TraceSink = std::function<void(const SlotTrace&)>;

Metrics run(const SimConfig& config, const TraceSink& sink = {});

}  // namespace ncbcast
