#include <gtest/gtest.h>

#include <set>
#include <stdexcept>

#include "ncbcast/gf.hpp"

using ncbcast::FieldContext;
using ncbcast::FieldElement;

namespace {

// Schoolbook carry-less multiply followed by reduction; independent of the
// table construction.
unsigned slow_mul(unsigned a, unsigned b, unsigned poly, unsigned m) {
  unsigned acc = 0;
  for (unsigned i = 0; i < m; ++i) {
    if (b & (1u << i)) acc ^= a << i;
  }
  for (int bit = static_cast<int>(2 * m); bit >= static_cast<int>(m); --bit) {
    if (acc & (1u << bit)) acc ^= poly << (bit - static_cast<int>(m));
  }
  return acc;
}

unsigned clmul(unsigned a, unsigned b) {
  unsigned acc = 0;
  for (unsigned i = 0; i < 16; ++i) {
    if (b & (1u << i)) acc ^= a << i;
  }
  return acc;
}

}  // namespace

TEST(Gf, AddIsXorAndSelfInverse) {
  FieldContext f2(1);
  EXPECT_EQ(f2.add(FieldElement(1), FieldElement(1)), FieldElement(0));
  for (unsigned m = 1; m <= 8; ++m) {
    FieldContext f(m);
    for (unsigned a = 0; a < f.size(); ++a) {
      EXPECT_TRUE(f.add(FieldElement(a), FieldElement(a)).is_zero());
    }
  }
}

TEST(Gf, AxiomsHoldExhaustivelyForSmallFields) {
  for (unsigned m = 1; m <= 3; ++m) {
    FieldContext f(m);
    const unsigned M = f.size();
    for (unsigned a = 0; a < M; ++a) {
      const FieldElement A(a);
      EXPECT_EQ(f.mul(A, FieldElement(1)), A);
      EXPECT_TRUE(f.mul(A, FieldElement(0)).is_zero());
      if (a != 0) {
        EXPECT_EQ(f.mul(A, f.inv(A)), FieldElement(1));
      }
      for (unsigned b = 0; b < M; ++b) {
        const FieldElement B(b);
        EXPECT_EQ(f.mul(A, B), f.mul(B, A));
        for (unsigned c = 0; c < M; ++c) {
          const FieldElement C(c);
          EXPECT_EQ(f.mul(f.mul(A, B), C), f.mul(A, f.mul(B, C)));
          EXPECT_EQ(f.mul(A, f.add(B, C)), f.add(f.mul(A, B), f.mul(A, C)));
        }
      }
    }
  }
}

TEST(Gf, ProductTableMatchesSchoolbookMultiply) {
  for (unsigned m = 1; m <= 8; ++m) {
    FieldContext f(m);
    for (unsigned a = 0; a < f.size(); ++a) {
      for (unsigned b = 0; b < f.size(); ++b) {
        ASSERT_EQ(f.mul(FieldElement(a), FieldElement(b)).value,
                  slow_mul(a, b, f.polynomial(), m))
            << "m=" << m << " a=" << a << " b=" << b;
      }
    }
  }
}

TEST(Gf, MulRowAgreesWithMul) {
  FieldContext f(8);
  for (unsigned c = 0; c < 256; c += 37) {
    const auto* row = f.mul_row(FieldElement(c));
    for (unsigned x = 0; x < 256; ++x) EXPECT_EQ(row[x], f.mul(FieldElement(c), FieldElement(x)).value);
  }
}

// Reducible polynomials of degree m are exactly the products of two factors
// of degree >= 1.
TEST(Gf, IrreducibilityMatchesFactorEnumeration) {
  for (unsigned m = 1; m <= 8; ++m) {
    std::set<unsigned> reducible;
    for (unsigned a = 2; a < (1u << m); ++a) {
      for (unsigned b = 2; b < (1u << m); ++b) {
        const unsigned p = clmul(a, b);
        if (p >= (1u << m) && p < (2u << m)) reducible.insert(p);
      }
    }
    for (unsigned p = 1u << m; p < (2u << m); ++p) {
      EXPECT_EQ(ncbcast::is_irreducible(p, m), reducible.count(p) == 0) << "poly " << p;
    }
    EXPECT_TRUE(ncbcast::is_irreducible(FieldContext::default_polynomial(m), m));
  }
}

TEST(Gf, DefaultPolynomials) {
  const unsigned expected[] = {0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11B};
  for (unsigned m = 1; m <= 8; ++m) EXPECT_EQ(FieldContext::default_polynomial(m), expected[m - 1]);
}

TEST(Gf, Errors) {
  FieldContext f(4);
  EXPECT_THROW(f.inv(FieldElement(0)), std::domain_error);
  EXPECT_THROW(FieldContext(0), std::invalid_argument);
  EXPECT_THROW(FieldContext(9), std::invalid_argument);
  EXPECT_THROW(FieldContext(2, 0x5), std::invalid_argument);  // x^2 + 1 = (x + 1)^2
  EXPECT_NO_THROW(FieldContext(8, 0x11D));
}

TEST(Gf, ExponentForReceivers) {
  EXPECT_EQ(FieldContext::exponent_for_receivers(1), 1u);
  EXPECT_EQ(FieldContext::exponent_for_receivers(2), 1u);
  EXPECT_EQ(FieldContext::exponent_for_receivers(3), 2u);
  EXPECT_EQ(FieldContext::exponent_for_receivers(4), 2u);
  EXPECT_EQ(FieldContext::exponent_for_receivers(8), 3u);
  EXPECT_EQ(FieldContext::exponent_for_receivers(10), 4u);
  EXPECT_EQ(FieldContext::exponent_for_receivers(256), 8u);
  EXPECT_THROW(FieldContext::exponent_for_receivers(257), std::invalid_argument);
}
