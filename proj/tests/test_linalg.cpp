#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "ncbcast/gf.hpp"
#include "ncbcast/linalg.hpp"

using namespace ncbcast;

namespace {

using Indices = std::vector<PacketIndex>;

KnowledgeSpace space_of(const FieldContext& f, std::initializer_list<CodedVector> rows) {
  KnowledgeSpace s(f);
  for (const auto& r : rows) EXPECT_TRUE(s.insert(r));
  return s;
}

CodedVector random_vector(std::mt19937_64& rng, const FieldContext& f, PacketIndex length) {
  std::vector<FieldElement> c(length);
  for (auto& e : c) e = FieldElement(static_cast<unsigned>(rng() % f.size()));
  return CodedVector::dense(c, 1);
}

// Rank of GF(2) bit vectors by the xor-basis method.
std::size_t xor_rank(const std::vector<unsigned>& vs) {
  std::vector<unsigned> basis;
  for (unsigned v : vs) {
    for (unsigned b : basis) v = std::min(v, v ^ b);
    if (v) basis.push_back(v);
  }
  return basis.size();
}

CodedVector from_bits(unsigned bits, unsigned length) {
  std::vector<FieldElement> c(length);
  for (unsigned i = 0; i < length; ++i) c[i] = FieldElement((bits >> i) & 1u);
  return CodedVector::dense(c, 1);
}

}  // namespace

TEST(CodedVector, CanonicalTrimming) {
  const auto v = CodedVector::dense({0, 2, 1, 0});
  EXPECT_EQ(v.lowest(), 2u);
  EXPECT_EQ(v.highest(), 3u);
  EXPECT_EQ(v.nonzero_count(), 2u);
  EXPECT_EQ(v, CodedVector::dense({2, 1}, 2));
  EXPECT_TRUE(CodedVector::dense({0, 0}).is_zero());
  EXPECT_EQ(v.to_dense(4), (std::vector<unsigned>{0, 2, 1, 0}));
}

TEST(KnowledgeSpace, ReduceExamples) {
  FieldContext f(1);
  auto s = space_of(f, {CodedVector::dense({1, 1, 0}), CodedVector::dense({0, 1, 1})});
  EXPECT_TRUE(s.reduce(CodedVector::dense({1, 0, 1})).is_zero());

  FieldContext f4(2);
  KnowledgeSpace empty(f4);
  EXPECT_EQ(empty.reduce(CodedVector::dense({0, 2, 1})), CodedVector::dense({0, 2, 1}));

  auto one = space_of(f, {CodedVector::dense({1, 0, 0})});
  EXPECT_EQ(one.reduce(CodedVector::dense({1, 1, 0})), CodedVector::dense({0, 1, 0}));
}

TEST(KnowledgeSpace, InsertExamples) {
  FieldContext f(1);
  KnowledgeSpace s(f);
  EXPECT_TRUE(s.insert(CodedVector::dense({1, 0})));
  EXPECT_EQ(s.rank(), 1u);

  auto full = space_of(f, {CodedVector::unit(1), CodedVector::unit(2)});
  EXPECT_FALSE(full.insert(CodedVector::dense({1, 1})));
  EXPECT_FALSE(full.is_innovative(CodedVector::dense({1, 1})));

  auto t = space_of(f, {CodedVector::dense({1, 1, 0})});
  EXPECT_TRUE(t.insert(CodedVector::dense({0, 1, 1})));
  EXPECT_FALSE(t.insert(CodedVector::dense({1, 0, 1})));
  EXPECT_EQ(t.rank(), 2u);
}

TEST(KnowledgeSpace, FailedInsertLeavesSpaceUnchanged) {
  FieldContext f(2);
  auto s = space_of(f, {CodedVector::dense({1, 2, 0}), CodedVector::dense({0, 1, 3})});
  const auto before = s.basis();
  EXPECT_FALSE(s.insert(CodedVector::dense({1, 3, 3})));  // row1 + row2
  EXPECT_EQ(s.basis(), before);
  EXPECT_TRUE(s.last_decoded().empty());
}

TEST(KnowledgeSpace, DecodedAndSeenSets) {
  FieldContext f(1);
  EXPECT_EQ(space_of(f, {CodedVector::unit(1), CodedVector::unit(2)}).decoded_set(), (Indices{1, 2}));
  EXPECT_TRUE(space_of(f, {CodedVector::dense({1, 1, 0})}).decoded_set().empty());
  EXPECT_EQ(space_of(f, {CodedVector::dense({1, 0, 0}), CodedVector::dense({0, 1, 1})}).decoded_set(),
            (Indices{1}));

  EXPECT_EQ(space_of(f, {CodedVector::dense({1, 1, 0})}).seen_set(), (Indices{1}));
  EXPECT_EQ(space_of(f, {CodedVector::unit(2)}).seen_set(), (Indices{2}));
  const auto s = space_of(f, {CodedVector::dense({1, 0, 1}), CodedVector::dense({0, 1, 1})});
  EXPECT_EQ(s.seen_set(), (Indices{1, 2}));
  EXPECT_EQ(s.oldest_unseen(), 3u);
}

TEST(KnowledgeSpace, DeliveredPrefix) {
  FieldContext f(1);
  EXPECT_EQ(space_of(f, {CodedVector::unit(1), CodedVector::unit(2), CodedVector::dense({0, 0, 1, 1})})
                .delivered_prefix(),
            2u);
  EXPECT_EQ(KnowledgeSpace(f).delivered_prefix(), 0u);
  EXPECT_EQ(space_of(f, {CodedVector::unit(1)}).delivered_prefix(), 1u);
  // Decoding p_2 before p_1 does not deliver it.
  auto gap = space_of(f, {CodedVector::unit(2)});
  EXPECT_EQ(gap.delivered_prefix(), 0u);
  EXPECT_TRUE(gap.insert(CodedVector::unit(1)));
  EXPECT_EQ(gap.delivered_prefix(), 2u);
  EXPECT_EQ(gap.decoded_set(), (Indices{1, 2}));
}

TEST(KnowledgeSpace, DeliveryTest) {
  FieldContext f(1);
  EXPECT_TRUE(KnowledgeSpace(f).delivery_test(CodedVector::unit(1), 1));
  EXPECT_FALSE(space_of(f, {CodedVector::unit(1)}).delivery_test(CodedVector::dense({0, 1, 1}), 2));
  EXPECT_TRUE(space_of(f, {CodedVector::dense({0, 1, 1})}).delivery_test(CodedVector::dense({1, 1, 1}), 1));
}

TEST(KnowledgeSpace, LastDecodedReportsEveryNewlyDecodedPacket) {
  FieldContext f(1);
  auto s = space_of(f, {CodedVector::dense({1, 1, 0}), CodedVector::dense({0, 1, 1})});
  EXPECT_TRUE(s.insert(CodedVector::unit(3)));
  const auto got = s.last_decoded();
  EXPECT_EQ(Indices(got.begin(), got.end()), (Indices{1, 2, 3}));
}

// Every set of GF(2) vectors of length 4: rank, innovation and the decoded
// set agree with an independent xor-basis computation.
TEST(KnowledgeSpace, ExhaustiveGf2AgainstXorBasis) {
  FieldContext f(1);
  constexpr unsigned L = 4;
  for (unsigned a = 1; a < 16; ++a) {
    for (unsigned b = 1; b < 16; ++b) {
      for (unsigned c = 0; c < 16; ++c) {
        KnowledgeSpace s(f);
        std::vector<unsigned> held;
        for (unsigned v : {a, b}) {
          const bool grew = s.insert(from_bits(v, L));
          held.push_back(v);
          EXPECT_EQ(s.rank(), xor_rank(held));
          EXPECT_EQ(grew, xor_rank(held) == held.size() || (held.size() == 2 && xor_rank(held) == 2));
        }
        std::vector<unsigned> with_c = held;
        with_c.push_back(c);
        EXPECT_EQ(s.is_innovative(from_bits(c, L)), xor_rank(with_c) > xor_rank(held));
        for (unsigned i = 0; i < L; ++i) {
          std::vector<unsigned> with_e = held;
          with_e.push_back(1u << i);
          EXPECT_EQ(s.is_decoded(i + 1), xor_rank(with_e) == xor_rank(held));
        }
      }
    }
  }
}

TEST(KnowledgeSpace, BasisIsInsertionOrderInvariant) {
  std::mt19937_64 rng(42);
  for (unsigned m : {1u, 2u, 3u, 8u}) {
    FieldContext f(m);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<CodedVector> vs;
      const int count = 2 + static_cast<int>(rng() % 8);
      for (int i = 0; i < count; ++i) vs.push_back(random_vector(rng, f, 8));
      KnowledgeSpace reference(f);
      for (const auto& v : vs) reference.insert(v);
      for (int perm = 0; perm < 5; ++perm) {
        std::shuffle(vs.begin(), vs.end(), rng);
        KnowledgeSpace s(f);
        for (const auto& v : vs) s.insert(v);
        ASSERT_EQ(s.basis(), reference.basis());
      }
    }
  }
}

TEST(KnowledgeSpace, StructuralInvariants) {
  std::mt19937_64 rng(7);
  FieldContext f(2);
  for (int trial = 0; trial < 200; ++trial) {
    KnowledgeSpace s(f);
    for (int step = 0; step < 12; ++step) {
      // Sparse vectors make decoding events common.
      std::vector<FieldElement> c(10);
      for (auto& e : c) e = FieldElement(rng() % 3 == 0 ? static_cast<unsigned>(rng() % 4) : 0u);
      const auto v = CodedVector::dense(c, 1);
      const PacketIndex n = s.delivered_prefix() + 1;
      const bool deliverable = s.delivery_test(v, n);
      const bool innovative = s.is_innovative(v);
      if (deliverable) {
        EXPECT_TRUE(innovative);
      }
      const std::size_t rank = s.rank();
      const PacketIndex prefix = s.delivered_prefix();
      EXPECT_EQ(s.insert(v), innovative);
      EXPECT_EQ(s.rank(), rank + (innovative ? 1 : 0));
      EXPECT_GE(s.delivered_prefix(), prefix);
      if (deliverable) {
        EXPECT_TRUE(s.is_decoded(n));
      }

      const auto rows = s.basis();
      const auto seen = s.seen_set();
      for (PacketIndex d : s.decoded_set()) {
        EXPECT_TRUE(std::binary_search(seen.begin(), seen.end(), d));
      }
      for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].at(rows[i].lowest()), FieldElement(1));
        for (std::size_t j = 0; j < rows.size(); ++j) {
          if (i != j) {
            EXPECT_TRUE(rows[j].at(rows[i].lowest()).is_zero());
          }
        }
      }
    }
  }
}
