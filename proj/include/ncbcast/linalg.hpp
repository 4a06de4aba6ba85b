#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "ncbcast/gf.hpp"

namespace ncbcast {

/// Absolute, 1-based packet index. Index 0 means "no packet".
using PacketIndex = std::uint64_t;

/// A coefficient vector over packets p_1, p_2, ... with absolute indexing.
///
/// Only the span [first, first + size) is stored; everything outside it is
/// zero. Canonical form trims zeros at both ends, so two vectors compare
/// equal iff they have the same coefficients.
class CodedVector {
 public:
  CodedVector() = default;

  /// Dense coefficients starting at packet `first`, e.g. dense({1, 1, 0})
  /// is p_1 + p_2.
  static CodedVector dense(std::initializer_list<unsigned> values, PacketIndex first = 1);
  static CodedVector dense(std::span<const FieldElement> values, PacketIndex first = 1);
  static CodedVector unit(PacketIndex index);

  FieldElement at(PacketIndex index) const {
    if (index < first_ || index >= first_ + coeffs_.size()) return FieldElement{};
    return coeffs_[index - first_];
  }
  void set(PacketIndex index, FieldElement value);

  bool is_zero() const { return coeffs_.empty(); }
  /// Lowest / highest index with a nonzero coefficient; 0 for the zero vector.
  PacketIndex lowest() const { return coeffs_.empty() ? 0 : first_; }
  PacketIndex highest() const { return coeffs_.empty() ? 0 : first_ + coeffs_.size() - 1; }
  std::size_t nonzero_count() const;

  /// this += c * other
  void add_scaled(FieldElement c, const CodedVector& other, const FieldContext& field);
  void scale(FieldElement c, const FieldContext& field);
  /// Zeroes every coefficient at index <= last.
  void clear_through(PacketIndex last);

  /// Dense coefficients for packets 1..length (zero padded).
  std::vector<unsigned> to_dense(PacketIndex length) const;

  friend bool operator==(const CodedVector&, const CodedVector&) = default;

 private:
  void trim();

  PacketIndex first_ = 1;
  std::vector<FieldElement> coeffs_;
};

/// Row-reduced span of the coefficient vectors a receiver holds.
///
/// Rows are kept in fully reduced echelon form with each pivot at the row's
/// lowest nonzero index, so p_i is seen iff i is a pivot and decoded iff the
/// pivot row is e_i. Leading rows that are unit vectors e_1..e_P are folded
/// into an implicit prefix so long runs keep a bounded basis.
class KnowledgeSpace {
 public:
  explicit KnowledgeSpace(const FieldContext& field) : field_(&field) {}

  const FieldContext& field() const { return *field_; }

  /// Residual of v after elimination; zero iff v lies in the span.
  CodedVector reduce(CodedVector v) const;
  bool is_innovative(const CodedVector& v) const { return !reduce(v).is_zero(); }

  /// Adds v if innovative. Returns whether the rank grew.
  bool insert(const CodedVector& v);

  std::size_t rank() const { return prefix_ + rows_.size(); }

  /// Largest n such that p_1..p_n are all decoded.
  PacketIndex delivered_prefix() const { return prefix_; }
  PacketIndex next_needed() const { return prefix_ + 1; }
  /// Smallest packet index that is not seen.
  PacketIndex oldest_unseen() const;

  bool is_decoded(PacketIndex index) const;
  bool is_seen(PacketIndex index) const;

  std::vector<PacketIndex> decoded_set() const;
  std::vector<PacketIndex> seen_set() const;

  /// Packets that became decoded during the most recent successful insert.
  std::span<const PacketIndex> last_decoded() const { return last_decoded_; }

  /// Whether receiving v lets the holder decode p_n, where
  /// n = delivered_prefix() + 1.
  bool delivery_test(const CodedVector& v, PacketIndex n) const;

  /// All basis rows in pivot order, including the folded unit prefix.
  std::vector<CodedVector> basis() const;

 private:
  static bool is_unit(const CodedVector& row) { return row.lowest() == row.highest(); }
  void fold_prefix();

  const FieldContext* field_;
  PacketIndex prefix_ = 0;
  std::vector<CodedVector> rows_;  // pivots strictly above prefix_, ascending
  std::vector<PacketIndex> last_decoded_;
};

}  // namespace ncbcast
