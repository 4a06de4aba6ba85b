#include <gtest/gtest.h>

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncbcast/sim.hpp"

using namespace ncbcast;

namespace {

SimConfig config(unsigned R, CodingScheme coding, double lambda, std::uint64_t horizon,
                 std::uint64_t seed = 1) {
  SimConfig c;
  c.receivers = R;
  c.coding = coding;
  c.rate.lambda = lambda;
  c.horizon = horizon;
  c.seed = seed;
  return c;
}

std::string serialize(const SlotTrace& t) {
  std::ostringstream o;
  o << t.slot << ' ' << t.added << t.uncoded_directive << t.idle << ' ';
  for (unsigned v : t.vector.to_dense(t.vector.highest())) o << v << ',';
  o << ' ';
  for (bool r : t.received) o << r;
  for (auto s : t.markov_states) o << ' ' << s;
  for (const auto& d : t.deliveries) {
    o << " d" << d.receiver << ':' << d.first << '-' << d.last << ':' << static_cast<int>(d.kind);
  }
  o << ' ' << t.coded_packet_count << ' ' << t.effective_list_size;
  return o.str();
}

constexpr CodingScheme kSchemes[] = {CodingScheme::scheme_a, CodingScheme::scheme_b,
                                     CodingScheme::rlnc};

}  // namespace

TEST(Sim, LosslessSingleReceiverDeliversImmediately) {
  auto c = config(1, CodingScheme::scheme_b, 1.0, 1000);
  c.mu = 1.0;
  const auto m = run(c);
  EXPECT_EQ(m.slots, 1000u);
  EXPECT_EQ(m.delivered, 1000u);
  EXPECT_DOUBLE_EQ(m.throughput(), 1.0);
  EXPECT_DOUBLE_EQ(m.mean_delay(), 0.0);
  EXPECT_EQ(m.violations.total(), 0u);
}

TEST(Sim, DeadChannelsDeliverNothing) {
  auto c = config(3, CodingScheme::scheme_a, 0.5, 500);
  c.mu = 0.0;
  Simulator sim(c);
  SlotTrace t;
  for (int i = 0; i < 500; ++i) {
    sim.step(&t);
    for (bool r : t.received) EXPECT_FALSE(r);
    for (auto s : t.markov_states) EXPECT_EQ(s, sim.newest());
    EXPECT_TRUE(t.deliveries.empty());
  }
  EXPECT_EQ(sim.metrics().delivered, 0u);
  EXPECT_EQ(sim.queue().size(), sim.newest());
}

TEST(Sim, ZeroHorizonGivesEmptyMetrics) {
  const auto m = run(config(4, CodingScheme::scheme_b, 0.5, 0));
  EXPECT_EQ(m.slots, 0u);
  EXPECT_EQ(m.delivered, 0u);
  EXPECT_EQ(m.throughput(), 0.0);
  EXPECT_EQ(m.mean_delay(), 0.0);
}

TEST(Sim, TraceIsDeterministic) {
  for (auto scheme : kSchemes) {
    auto c = config(4, scheme, 0.6, 3000, 77);
    std::vector<std::string> first, second;
    run(c, [&](const SlotTrace& t) { first.push_back(serialize(t)); });
    run(c, [&](const SlotTrace& t) { second.push_back(serialize(t)); });
    EXPECT_EQ(first, second);
    EXPECT_EQ(first.size(), 3000u);
  }
}

TEST(Sim, InvalidConfigurations) {
  auto c = config(4, CodingScheme::scheme_b, 0.5, 10);
  c.receivers = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = config(4, CodingScheme::scheme_b, 0.5, 10);
  c.mu = 1.5;
  EXPECT_THROW(Simulator{c}, std::invalid_argument);
  c = config(4, CodingScheme::scheme_b, 0.5, 10);
  c.field_exponent = 1;  // GF(2) with four receivers
  EXPECT_THROW(run(c), std::invalid_argument);
  c.field_exponent = 9;
  EXPECT_THROW(run(c), std::invalid_argument);
  c = config(4, CodingScheme::scheme_b, 1.5, 10);
  EXPECT_THROW(run(c), std::invalid_argument);
}

TEST(Sim, ParseDeliveryMode) {
  EXPECT_EQ(parse_delivery_mode("zero-leader"), DeliveryMode::zero_and_leader_only);
  EXPECT_EQ(parse_delivery_mode("zero"), DeliveryMode::zero_state_only);
  EXPECT_EQ(to_string(DeliveryMode::full), "full");
  EXPECT_THROW(parse_delivery_mode("all"), std::invalid_argument);
}

TEST(Sim, ClassifyDelivery) {
  const std::vector<std::uint64_t> pre{3, 1};
  EXPECT_EQ(classify_delivery(0, pre, 0, CodingScheme::scheme_b), DeliveryClass::zero_state);
  EXPECT_EQ(classify_delivery(0, pre, 2, CodingScheme::scheme_b), DeliveryClass::coefficient_based);
  EXPECT_EQ(classify_delivery(1, pre, 1, CodingScheme::scheme_b), DeliveryClass::leader_state);
  EXPECT_EQ(classify_delivery(1, pre, 1, CodingScheme::rlnc), DeliveryClass::coefficient_based);
  const std::vector<std::uint64_t> single{4};
  EXPECT_EQ(classify_delivery(0, single, 3, CodingScheme::scheme_a), DeliveryClass::leader_state);
}

TEST(Sim, SingleReceiverHasNoCoefficientDeliveriesUnderAB) {
  for (auto scheme : {CodingScheme::scheme_a, CodingScheme::scheme_b}) {
    const auto m = run(config(1, scheme, 0.7, 20000));
    EXPECT_EQ(m.delivery_events[2], 0u);
    EXPECT_GT(m.delivery_events[1], 0u);
  }
}

TEST(Sim, NoViolationsAcrossSchemes) {
  for (auto scheme : kSchemes) {
    for (unsigned R : {1u, 2u, 4u, 8u}) {
      for (auto rate : {RateScheme::baseline, RateScheme::delay_threshold, RateScheme::dynamic}) {
        auto c = config(R, scheme, 0.7, 20000, R);
        c.rate.scheme = rate;
        const auto m = run(c);
        EXPECT_EQ(m.violations.total(), 0u) << to_string(scheme) << " R=" << R << " " << to_string(rate);
        EXPECT_LE(m.throughput(), m.added_rate() + 1e-12);
        EXPECT_GT(m.delivered, 0u);
      }
    }
  }
}

TEST(Sim, ReceiversNeverMoveInOppositeDirections) {
  for (auto scheme : kSchemes) {
    const auto m = run(config(2, scheme, 0.7, 50000, 3));
    EXPECT_EQ(m.opposite_moves(), 0u);
  }
}

TEST(Sim, RestrictingDeliveryModesOnlyDelaysStamping) {
  for (auto scheme : kSchemes) {
    auto c = config(4, scheme, 0.6, 50000, 5);
    const auto full = run(c);
    c.delivery_mode = DeliveryMode::zero_and_leader_only;
    const auto leader = run(c);
    c.delivery_mode = DeliveryMode::zero_state_only;
    const auto zero = run(c);
    EXPECT_GE(full.delivered, leader.delivered);
    EXPECT_GE(leader.delivered, zero.delivered);
    EXPECT_LE(full.mean_delay(), leader.mean_delay());
    EXPECT_LE(leader.mean_delay(), zero.mean_delay());
    // Knowledge evolves identically.
    EXPECT_EQ(full.state_occupancy, zero.state_occupancy);
  }
}

TEST(Sim, StopModeSlotsSendOnePacket) {
  auto c = config(4, CodingScheme::scheme_b, 0.0, 20000);
  c.rate.scheme = RateScheme::delay_threshold;
  c.rate.threshold_slots = 3;
  std::uint64_t stops = 0;
  run(c, [&](const SlotTrace& t) {
    if (!t.uncoded_directive) return;
    ++stops;
    EXPECT_EQ(t.coded_packet_count, 1u);
    EXPECT_FALSE(t.added);
  });
  EXPECT_GT(stops, 0u);
}

TEST(Sim, QueueHoldsExactlyPacketsSomeReceiverLacks) {
  Simulator sim(config(3, CodingScheme::scheme_a, 0.6, 0));
  for (int i = 0; i < 2000; ++i) {
    sim.step();
    std::vector<PacketIndex> expected;
    for (PacketIndex p = 1; p <= sim.newest(); ++p) {
      for (const auto& k : sim.receivers()) {
        if (!k.is_decoded(p)) {
          expected.push_back(p);
          break;
        }
      }
    }
    ASSERT_EQ(std::vector<PacketIndex>(sim.queue().begin(), sim.queue().end()), expected);
  }
}

TEST(Sim, RlncProfileIsOneAtUnitEffectiveState) {
  const auto m = run(config(1, CodingScheme::rlnc, 0.7, 50000));
  const auto profile = coefficient_delivery_profile(m);
  ASSERT_FALSE(profile.empty());
  EXPECT_EQ(profile.front().s_star, 1u);
  EXPECT_GT(profile.front().deliverable, 0u);
  EXPECT_EQ(profile.front().probability, 1.0);
}
