#include "ncbcast/sim.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ncbcast {

namespace {

template <typename T>
void bump(std::vector<T>& hist, std::size_t index, T amount = 1) {
  if (hist.size() <= index) hist.resize(index + 1, T{});
  hist[index] += amount;
}

bool has_leaders(CodingScheme scheme) { return scheme != CodingScheme::rlnc; }

// Sorted packet queue with O(1) removal at the head; middle removals are
// rare (a packet decoded by everyone while an older one is still missing).
class PacketQueue {
 public:
  void push(PacketIndex p) { items_.push_back(p); }

  void remove(PacketIndex p) {
    const auto begin = items_.begin() + static_cast<std::ptrdiff_t>(head_);
    const auto it = std::lower_bound(begin, items_.end(), p);
    if (it == items_.end() || *it != p) return;
    if (it == begin) {
      ++head_;
      if (head_ > 4096 && head_ * 2 > items_.size()) {
        items_.erase(items_.begin(), items_.begin() + static_cast<std::ptrdiff_t>(head_));
        head_ = 0;
      }
    } else {
      items_.erase(it);
    }
  }

  std::span<const PacketIndex> view() const {
    return {items_.data() + head_, items_.size() - head_};
  }

 private:
  std::vector<PacketIndex> items_;
  std::size_t head_ = 0;
};

}  // namespace

std::string_view to_string(DeliveryMode mode) {
  switch (mode) {
    case DeliveryMode::full: return "full";
    case DeliveryMode::zero_state_only: return "zero";
    case DeliveryMode::zero_and_leader_only: return "zero-leader";
  }
  return "?";
}

DeliveryMode parse_delivery_mode(std::string_view text) {
  if (text == "full") return DeliveryMode::full;
  if (text == "zero") return DeliveryMode::zero_state_only;
  if (text == "zero-leader") return DeliveryMode::zero_and_leader_only;
  throw std::invalid_argument("unknown delivery mode '" + std::string(text) + "'");
}

std::string_view to_string(DeliveryClass c) {
  switch (c) {
    case DeliveryClass::zero_state: return "zero";
    case DeliveryClass::leader_state: return "leader";
    case DeliveryClass::coefficient_based: return "coefficient";
  }
  return "?";
}

unsigned SimConfig::resolved_field_exponent() const {
  return field_exponent != 0 ? field_exponent : FieldContext::exponent_for_receivers(receivers);
}

void SimConfig::validate() const {
  if (receivers < 1) throw std::invalid_argument("need at least one receiver");
  if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("mu must lie in [0, 1]");
  const unsigned m = resolved_field_exponent();
  if (m < 1 || m > FieldContext::kMaxExponent) {
    throw std::invalid_argument("field exponent must be in [1, 8]");
  }
  if ((1u << m) < receivers) {
    throw std::invalid_argument("field GF(2^" + std::to_string(m) + ") is smaller than R = " +
                                std::to_string(receivers));
  }
  rate.validate(mu);
}

DeliveryClass classify_delivery(std::size_t r, std::span<const std::uint64_t> pre_states,
                                std::uint64_t post_state, CodingScheme scheme) {
  if (post_state == 0) return DeliveryClass::zero_state;
  if (has_leaders(scheme) && pre_states[r] > 0 &&
      pre_states[r] == *std::min_element(pre_states.begin(), pre_states.end())) {
    return DeliveryClass::leader_state;
  }
  return DeliveryClass::coefficient_based;
}

double Metrics::throughput() const {
  if (slots == 0 || receivers == 0) return 0.0;
  return static_cast<double>(delivered) / (static_cast<double>(slots) * receivers);
}

double Metrics::mean_delay() const {
  return delivered == 0 ? 0.0 : delay_sum / static_cast<double>(delivered);
}

double Metrics::added_rate() const {
  return slots == 0 ? 0.0 : static_cast<double>(added) / static_cast<double>(slots);
}

double Metrics::uncoded_fraction() const {
  if (transmissions == 0) return 0.0;
  const std::uint64_t single = coded_count.size() > 1 ? coded_count[1] : 0;
  return static_cast<double>(single) / static_cast<double>(transmissions);
}

std::vector<ProfilePoint> coefficient_delivery_profile(const Metrics& metrics) {
  std::vector<ProfilePoint> out;
  for (std::size_t s = 1; s < metrics.deliverable_slots.size(); ++s) {
    const std::uint64_t n = metrics.deliverable_slots[s];
    if (n == 0) continue;
    const std::uint64_t k =
        s < metrics.coefficient_deliveries.size() ? metrics.coefficient_deliveries[s] : 0;
    out.push_back({s, n, k, static_cast<double>(k) / static_cast<double>(n)});
  }
  return out;
}

struct Simulator::World {
  SimConfig config;
  FieldContext field;
  RateController rate;
  RandomStream coefficients;
  std::vector<RandomStream> channels;
  std::vector<KnowledgeSpace> spaces;

  std::uint64_t slot = 0;
  PacketIndex newest = 0;     // A(t)
  PacketIndex max_coded = 0;  // highest index ever given a nonzero coefficient
  PacketQueue queue;
  std::vector<std::uint64_t> entry_slot{0};     // by packet index
  std::vector<std::uint32_t> decoded_by{0};     // receivers that decoded the packet

  std::vector<std::uint64_t> state;       // s_r tracked incrementally
  std::vector<PacketIndex> accounted;     // prefix stamped under the delivery mode
  std::vector<std::uint64_t> last_zero;   // slot of the last visit to state 0

  std::vector<std::uint64_t> pre;
  std::vector<PacketIndex> finished;
  FeedbackSnapshot snapshot;
  Metrics metrics;

  explicit World(const SimConfig& c)
      : config(c),
        field(c.resolved_field_exponent()),
        rate(c.rate, c.receivers, c.mu, c.seed),
        coefficients(c.seed, static_cast<std::uint64_t>(StreamId::coefficients)),
        spaces(c.receivers, KnowledgeSpace(field)),
        state(c.receivers, 0),
        accounted(c.receivers, 0),
        last_zero(c.receivers, 0),
        pre(c.receivers, 0) {
    channels.reserve(c.receivers);
    for (unsigned r = 0; r < c.receivers; ++r) {
      channels.emplace_back(c.seed, static_cast<std::uint64_t>(StreamId::channel_base) + r);
    }
    metrics.receivers = c.receivers;
  }

  void fill_snapshot() {
    const auto q = queue.view();
    const std::size_t R = spaces.size();
    snapshot.mu = config.mu;
    snapshot.markov_states.resize(R);
    snapshot.undelivered.resize(R);
    snapshot.delivered_prefix.resize(R);
    for (std::size_t r = 0; r < R; ++r) {
      const PacketIndex dp = spaces[r].delivered_prefix();
      snapshot.markov_states[r] = newest - spaces[r].rank();
      snapshot.delivered_prefix[r] = dp;
      snapshot.undelivered[r] =
          static_cast<std::uint64_t>(q.end() - std::upper_bound(q.begin(), q.end(), dp));
    }
    snapshot.queue.clear();
    if (config.rate.scheme == RateScheme::delay_threshold) {
      // Only the head's age matters to the decision.
      if (!q.empty()) snapshot.queue.push_back({q.front(), slot - entry_slot[q.front()]});
    }
  }

  void stamp(std::size_t r, PacketIndex through) {
    for (PacketIndex j = accounted[r] + 1; j <= through; ++j) {
      metrics.delay_sum += static_cast<double>(slot - entry_slot[j]);
      ++metrics.delivered;
    }
    accounted[r] = std::max(accounted[r], through);
  }
};

Simulator::Simulator(const SimConfig& config) {
  config.validate();
  world_ = std::make_unique<World>(config);
}

Simulator::~Simulator() = default;

std::uint64_t Simulator::slot() const { return world_->slot; }
const Metrics& Simulator::metrics() const { return world_->metrics; }
std::span<const KnowledgeSpace> Simulator::receivers() const { return world_->spaces; }
std::span<const PacketIndex> Simulator::queue() const { return world_->queue.view(); }
PacketIndex Simulator::newest() const { return world_->newest; }

void Simulator::step(SlotTrace* trace) {
  World& w = *world_;
  Metrics& m = w.metrics;
  const SimConfig& cfg = w.config;
  const std::size_t R = w.spaces.size();
  const std::uint64_t t = ++w.slot;
  ++m.slots;

  // Rate control on the feedback collected up to the previous slot.
  w.fill_snapshot();
  const RateDecision decision = w.rate.decide(w.snapshot);
  if (cfg.rate.scheme == RateScheme::dynamic) {
    if (cfg.record_lambda_series) m.lambda_est.push_back(decision.lambda_estimate);
    if (!decision.threshold_agrees) ++m.violations.dynamic_metric;
  }
  if (decision.add) {
    ++w.newest;
    w.queue.push(w.newest);
    w.entry_slot.push_back(t);
    w.decoded_by.push_back(0);
    ++m.added;
  }

  std::uint64_t min_pre = UINT64_MAX;
  bool any_incomplete = false;
  for (std::size_t r = 0; r < R; ++r) {
    w.pre[r] = w.newest - w.spaces[r].rank();
    min_pre = std::min(min_pre, w.pre[r]);
    any_incomplete = any_incomplete || w.pre[r] > 0;
  }

  // Coding block.
  CodedVector v;
  std::size_t effective = 0;
  const bool uncoded = decision.uncoded.has_value();
  if (uncoded) {
    v = CodedVector::unit(*decision.uncoded);
    effective = w.queue.view().size();
    ++m.uncoded_directives;
  } else if (any_incomplete) {
    CodingInput input{w.newest, w.queue.view(), w.spaces, &w.field};
    CodingOutput out = encode(cfg.coding, input, w.coefficients);
    v = std::move(out.vector);
    effective = out.effective_list_size;
    m.rlnc_draws += out.draws;
    m.rlnc_max_draws = std::max(m.rlnc_max_draws, out.draws);
  }
  const bool idle = v.is_zero();
  const PacketIndex max_coded_before = w.max_coded;
  if (!idle) {
    w.max_coded = std::max(w.max_coded, v.highest());
    ++m.transmissions;
    bump(m.coded_count, v.nonzero_count());
  }

  if (trace) {
    trace->slot = t;
    trace->added = decision.add;
    trace->uncoded_directive = uncoded;
    trace->idle = idle;
    trace->vector = v;
    trace->received.assign(R, false);
    trace->markov_states.assign(R, 0);
    trace->deliveries.clear();
    trace->coded_packet_count = idle ? 0 : v.nonzero_count();
    trace->effective_list_size = effective;
  }

  // Channels draw every slot so that runs share random numbers.
  const bool leaders_apply = has_leaders(cfg.coding);
  w.finished.clear();
  std::uint64_t min_post = UINT64_MAX;
  std::array<int, 2> moves{};
  for (std::size_t r = 0; r < R; ++r) {
    KnowledgeSpace& space = w.spaces[r];
    const bool received = w.channels[r].uniform() < cfg.mu;
    const std::size_t rank_before = space.rank();
    const PacketIndex dp_before = space.delivered_prefix();
    const bool leader = leaders_apply && w.pre[r] > 0 && w.pre[r] == min_pre;
    bool innovative = false;

    if (received && !idle) {
      const std::uint64_t eff_pre = max_coded_before - rank_before;
      const bool deliverable = w.pre[r] > 0 && !leader && v.highest() <= max_coded_before &&
                               eff_pre >= 1;
      innovative = space.insert(v);
      if (!innovative && w.pre[r] > 0 && !uncoded) ++m.violations.innovation;
      if (innovative) {
        for (PacketIndex j : space.last_decoded()) {
          if (++w.decoded_by[j] == R) w.finished.push_back(j);
        }
      }
      const PacketIndex dp_after = space.delivered_prefix();
      if (deliverable) {
        bump(m.deliverable_slots, eff_pre);
        if (dp_after > dp_before) bump(m.coefficient_deliveries, eff_pre);
      }
      if (dp_after > dp_before) {
        const std::uint64_t post = w.newest - space.rank();
        const DeliveryClass kind = classify_delivery(r, w.pre, post, cfg.coding);
        ++m.delivery_events[static_cast<std::size_t>(kind)];
        m.delivered_packets[static_cast<std::size_t>(kind)] += dp_after - dp_before;
        if (kind == DeliveryClass::coefficient_based && eff_pre > 0) {
          const std::uint64_t eff_post = w.max_coded - space.rank();
          if (eff_post + 1 != eff_pre) ++m.violations.lemma2;
        }
        if (trace) trace->deliveries.push_back({r, dp_before + 1, dp_after, kind});
      }
      if (leader && innovative && !uncoded && space.delivered_prefix() != space.rank()) {
        ++m.violations.leader_flush;
      }
    }
    if (trace) trace->received[r] = received;

    const PacketIndex dp = space.delivered_prefix();
    if (dp < dp_before) ++m.violations.prefix_regression;

    const std::uint64_t previous = w.state[r];
    w.state[r] = w.state[r] + (decision.add ? 1 : 0) - (innovative ? 1 : 0);
    const std::uint64_t post = w.newest - space.rank();
    if (w.state[r] != post) {
      ++m.violations.markov_mismatch;
      w.state[r] = post;
    }
    if (post == 0 && dp != w.newest) ++m.violations.zero_state;
    if (r < 2) moves[r] = static_cast<int>(post) - static_cast<int>(previous);

    switch (cfg.delivery_mode) {
      case DeliveryMode::full:
        w.stamp(r, dp);
        break;
      case DeliveryMode::zero_state_only:
        if (post == 0) w.stamp(r, dp);
        break;
      case DeliveryMode::zero_and_leader_only:
        if (post == 0 || (leader && received && !idle)) w.stamp(r, dp);
        break;
    }

    bump(m.state_occupancy, post);
    if (post == 0) {
      bump(m.cycle_length, t - w.last_zero[r]);
      w.last_zero[r] = t;
    }
    min_post = std::min(min_post, post);
    if (trace) trace->markov_states[r] = post;
  }
  bump(m.leader_occupancy, min_post);
  if (R >= 2 && std::abs(moves[0]) <= 1 && std::abs(moves[1]) <= 1) {
    ++m.joint_moves[moves[0] + 1][moves[1] + 1];
  }

  for (PacketIndex j : w.finished) w.queue.remove(j);
}

Metrics run(const SimConfig& config, const TraceSink& sink) {
  Simulator sim(config);
  SlotTrace trace;
  for (std::uint64_t t = 0; t < config.horizon; ++t) {
    if (sink) {
      sim.step(&trace);
      sink(trace);
    } else {
      sim.step();
    }
  }
  return sim.metrics();
}

}  // namespace ncbcast
