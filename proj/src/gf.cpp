#include "ncbcast/gf.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace ncbcast {

namespace {

int degree_of(unsigned poly) {
  int d = -1;
  while (poly != 0) {
    poly >>= 1;
    ++d;
  }
  return d;
}

unsigned poly_mod(unsigned a, unsigned b) {
  const int db = degree_of(b);
  for (int da = degree_of(a); da >= db; da = degree_of(a)) {
    a ^= b << (da - db);
  }
  return a;
}

// Carry-less multiply by x followed by reduction.
unsigned times_x(unsigned a, unsigned m, unsigned poly) {
  a <<= 1;
  if (a & (1u << m)) a ^= poly;
  return a;
}

unsigned slow_mul(unsigned a, unsigned b, unsigned m, unsigned poly) {
  unsigned acc = 0;
  while (b != 0) {
    if (b & 1u) acc ^= a;
    a = times_x(a, m, poly);
    b >>= 1;
  }
  return acc;
}

}  // namespace

bool is_irreducible(unsigned polynomial, unsigned degree) {
  if (degree_of(polynomial) != static_cast<int>(degree) || degree == 0) return false;
  for (unsigned d = 2; degree_of(d) <= static_cast<int>(degree) / 2; ++d) {
    if (poly_mod(polynomial, d) == 0) return false;
  }
  return true;
}

unsigned FieldContext::default_polynomial(unsigned m) {
  static constexpr std::array<unsigned, kMaxExponent + 1> kPolys = {
      0,
      0x3,    // x + 1
      0x7,    // x^2 + x + 1
      0xB,    // x^3 + x + 1
      0x13,   // x^4 + x + 1
      0x25,   // x^5 + x^2 + 1
      0x43,   // x^6 + x + 1
      0x83,   // x^7 + x + 1
      0x11B,  // x^8 + x^4 + x^3 + x + 1
  };
  if (m == 0 || m > kMaxExponent) {
    throw std::invalid_argument("field exponent must be in [1, 8], got " + std::to_string(m));
  }
  return kPolys[m];
}

unsigned FieldContext::exponent_for_receivers(unsigned receivers) {
  unsigned m = 1;
  while ((1u << m) < receivers) ++m;
  if (m > kMaxExponent) throw std::invalid_argument("too many receivers for GF(2^8)");
  return m;
}

FieldContext::FieldContext(unsigned m) : FieldContext(m, default_polynomial(m)) {}

FieldContext::FieldContext(unsigned m, unsigned polynomial)
    : m_(m), size_(1u << m), polynomial_(polynomial) {
  if (m == 0 || m > kMaxExponent) {
    throw std::invalid_argument("field exponent must be in [1, 8], got " + std::to_string(m));
  }
  if (!is_irreducible(polynomial, m)) {
    throw std::invalid_argument("reduction polynomial is not irreducible");
  }

  // Log/antilog tables over a primitive element. x is not primitive for
  // every conventional polynomial (x^8+x^4+x^3+x+1 needs x+1), so search.
  const unsigned order = size_ - 1;
  std::vector<unsigned> antilog(order);
  std::vector<unsigned> log(size_, 0);
  for (unsigned g = 1; g < size_; ++g) {
    unsigned e = 1;
    unsigned k = 0;
    for (; k < order; ++k) {
      antilog[k] = e;
      e = slow_mul(e, g, m_, polynomial_);
      if (e == 1) break;
    }
    if (k + 1 == order) break;
  }
  for (unsigned k = 0; k < order; ++k) log[antilog[k]] = k;

  mul_.assign(static_cast<std::size_t>(size_) * size_, 0);
  inv_.assign(size_, 0);
  for (unsigned a = 1; a < size_; ++a) {
    for (unsigned b = 1; b < size_; ++b) {
      mul_[a * size_ + b] = static_cast<std::uint8_t>(antilog[(log[a] + log[b]) % order]);
    }
    inv_[a] = static_cast<std::uint8_t>(antilog[(order - log[a]) % order]);
  }
}

FieldElement FieldContext::inv(FieldElement a) const {
  if (a.is_zero()) throw std::domain_error("zero has no multiplicative inverse");
  return FieldElement(inv_[a.value]);
}

}  // namespace ncbcast
