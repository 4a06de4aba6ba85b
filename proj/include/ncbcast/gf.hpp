#pragma once

#include <compare>
#include <cstdint>
#include <vector>

namespace ncbcast {

/// An element of GF(2^m), stored as its polynomial bit pattern.
struct FieldElement {
  std::uint8_t value = 0;

  constexpr FieldElement() = default;
  constexpr explicit FieldElement(unsigned v) : value(static_cast<std::uint8_t>(v)) {}

  constexpr bool is_zero() const { return value == 0; }
  friend constexpr bool operator==(FieldElement, FieldElement) = default;
  friend constexpr auto operator<=>(FieldElement, FieldElement) = default;
};

/// Arithmetic tables for GF(2^m), 1 <= m <= 8.
///
/// The context is immutable once built and may be shared freely between
/// threads. Multiplication uses a full M x M product table, so the hot
/// row-update loop in the knowledge spaces is a single lookup per entry.
class FieldContext {
 public:
  static constexpr unsigned kMaxExponent = 8;

  /// Builds the field with the conventional reduction polynomial for `m`.
  explicit FieldContext(unsigned m);

  /// Builds the field reduced by `polynomial` (bit i = coefficient of x^i).
  /// Throws std::invalid_argument if the polynomial is not irreducible of
  /// degree m.
  FieldContext(unsigned m, unsigned polynomial);

  unsigned exponent() const { return m_; }
  unsigned size() const { return size_; }
  unsigned polynomial() const { return polynomial_; }

  FieldElement add(FieldElement a, FieldElement b) const {
    return FieldElement(a.value ^ b.value);
  }
  FieldElement mul(FieldElement a, FieldElement b) const {
    return FieldElement(mul_[a.value * size_ + b.value]);
  }
  /// Throws std::domain_error for a zero argument.
  FieldElement inv(FieldElement a) const;

  /// Row of the product table for a fixed left operand: row[x] = c * x.
  const std::uint8_t* mul_row(FieldElement c) const { return &mul_[c.value * size_]; }

  /// Conventional irreducible polynomial for m (x^2+x+1, x^3+x+1, ...).
  static unsigned default_polynomial(unsigned m);

  /// Smallest power-of-two field exponent with 2^m >= receivers.
  static unsigned exponent_for_receivers(unsigned receivers);

 private:
  unsigned m_;
  unsigned size_;
  unsigned polynomial_;
  std::vector<std::uint8_t> mul_;
  std::vector<std::uint8_t> inv_;
};

/// Exhaustive trial-division irreducibility test over GF(2).
bool is_irreducible(unsigned polynomial, unsigned degree);

}  // namespace ncbcast
