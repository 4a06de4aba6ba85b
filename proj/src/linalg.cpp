#include "ncbcast/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace ncbcast {

CodedVector CodedVector::dense(std::initializer_list<unsigned> values, PacketIndex first) {
  std::vector<FieldElement> elems;
  elems.reserve(values.size());
  for (unsigned v : values) elems.emplace_back(v);
  return dense(elems, first);
}

CodedVector CodedVector::dense(std::span<const FieldElement> values, PacketIndex first) {
  if (first == 0) throw std::invalid_argument("packet indices start at 1");
  CodedVector out;
  out.first_ = first;
  out.coeffs_.assign(values.begin(), values.end());
  out.trim();
  return out;
}

CodedVector CodedVector::unit(PacketIndex index) {
  if (index == 0) throw std::invalid_argument("packet indices start at 1");
  CodedVector out;
  out.first_ = index;
  out.coeffs_.push_back(FieldElement(1));
  return out;
}

void CodedVector::set(PacketIndex index, FieldElement value) {
  if (index == 0) throw std::invalid_argument("packet indices start at 1");
  if (coeffs_.empty()) {
    if (value.is_zero()) return;
    first_ = index;
    coeffs_.push_back(value);
    return;
  }
  if (index < first_) {
    if (value.is_zero()) return;
    coeffs_.insert(coeffs_.begin(), first_ - index, FieldElement{});
    first_ = index;
  } else if (index >= first_ + coeffs_.size()) {
    if (value.is_zero()) return;
    coeffs_.resize(index - first_ + 1);
  }
  coeffs_[index - first_] = value;
  trim();
}

std::size_t CodedVector::nonzero_count() const {
  return static_cast<std::size_t>(
      std::count_if(coeffs_.begin(), coeffs_.end(), [](FieldElement e) { return !e.is_zero(); }));
}

void CodedVector::add_scaled(FieldElement c, const CodedVector& other, const FieldContext& field) {
  if (c.is_zero() || other.is_zero()) return;
  if (coeffs_.empty()) {
    first_ = other.first_;
  } else if (other.first_ < first_) {
    coeffs_.insert(coeffs_.begin(), first_ - other.first_, FieldElement{});
    first_ = other.first_;
  }
  const std::size_t offset = other.first_ - first_;
  if (coeffs_.size() < offset + other.coeffs_.size()) coeffs_.resize(offset + other.coeffs_.size());
  const std::uint8_t* row = field.mul_row(c);
  FieldElement* dst = coeffs_.data() + offset;
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) {
    dst[i].value ^= row[other.coeffs_[i].value];
  }
  trim();
}

void CodedVector::scale(FieldElement c, const FieldContext& field) {
  if (c.is_zero()) {
    coeffs_.clear();
    return;
  }
  const std::uint8_t* row = field.mul_row(c);
  for (auto& e : coeffs_) e.value = row[e.value];
}

void CodedVector::clear_through(PacketIndex last) {
  if (coeffs_.empty() || last < first_) return;
  const PacketIndex drop = std::min<PacketIndex>(last - first_ + 1, coeffs_.size());
  coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(drop));
  first_ += drop;
  trim();
}

std::vector<unsigned> CodedVector::to_dense(PacketIndex length) const {
  std::vector<unsigned> out(length, 0);
  for (PacketIndex i = 1; i <= length; ++i) out[i - 1] = at(i).value;
  return out;
}

void CodedVector::trim() {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
  std::size_t lead = 0;
  while (lead < coeffs_.size() && coeffs_[lead].is_zero()) ++lead;
  if (lead > 0) {
    coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(lead));
    first_ += lead;
  }
  if (coeffs_.empty()) first_ = 1;
}

CodedVector KnowledgeSpace::reduce(CodedVector v) const {
  v.clear_through(prefix_);
  if (v.is_zero()) return v;
  // Rows are fully reduced, so a single ascending pass suffices.
  auto it = std::lower_bound(rows_.begin(), rows_.end(), v.lowest(),
                             [](const CodedVector& row, PacketIndex p) { return row.lowest() < p; });
  for (; it != rows_.end() && !v.is_zero(); ++it) {
    const PacketIndex pivot = it->lowest();
    if (pivot > v.highest()) break;
    const FieldElement c = v.at(pivot);
    if (!c.is_zero()) v.add_scaled(c, *it, *field_);
  }
  return v;
}

bool KnowledgeSpace::insert(const CodedVector& v) {
  last_decoded_.clear();
  CodedVector residual = reduce(v);
  if (residual.is_zero()) return false;

  const PacketIndex pivot = residual.lowest();
  residual.scale(field_->inv(residual.at(pivot)), *field_);

  // Back-substitute into rows with lower pivots; higher pivots are already
  // zero at this column.
  for (auto& row : rows_) {
    if (row.lowest() >= pivot) break;
    const FieldElement c = row.at(pivot);
    if (c.is_zero()) continue;
    const bool was_unit = is_unit(row);
    row.add_scaled(c, residual, *field_);
    if (!was_unit && is_unit(row)) last_decoded_.push_back(row.lowest());
  }
  if (is_unit(residual)) last_decoded_.push_back(pivot);

  auto pos = std::lower_bound(rows_.begin(), rows_.end(), pivot,
                              [](const CodedVector& row, PacketIndex p) { return row.lowest() < p; });
  rows_.insert(pos, std::move(residual));
  std::sort(last_decoded_.begin(), last_decoded_.end());
  fold_prefix();
  return true;
}

void KnowledgeSpace::fold_prefix() {
  std::size_t n = 0;
  while (n < rows_.size() && rows_[n].lowest() == prefix_ + 1 && is_unit(rows_[n])) {
    ++prefix_;
    ++n;
  }
  if (n > 0) rows_.erase(rows_.begin(), rows_.begin() + static_cast<std::ptrdiff_t>(n));
}

PacketIndex KnowledgeSpace::oldest_unseen() const {
  PacketIndex expected = prefix_ + 1;
  for (const auto& row : rows_) {
    if (row.lowest() != expected) break;
    ++expected;
  }
  return expected;
}

bool KnowledgeSpace::is_decoded(PacketIndex index) const {
  if (index == 0) return false;
  if (index <= prefix_) return true;
  auto it = std::lower_bound(rows_.begin(), rows_.end(), index,
                             [](const CodedVector& row, PacketIndex p) { return row.lowest() < p; });
  return it != rows_.end() && it->lowest() == index && is_unit(*it);
}

bool KnowledgeSpace::is_seen(PacketIndex index) const {
  if (index == 0) return false;
  if (index <= prefix_) return true;
  auto it = std::lower_bound(rows_.begin(), rows_.end(), index,
                             [](const CodedVector& row, PacketIndex p) { return row.lowest() < p; });
  return it != rows_.end() && it->lowest() == index;
}

std::vector<PacketIndex> KnowledgeSpace::decoded_set() const {
  std::vector<PacketIndex> out;
  for (PacketIndex i = 1; i <= prefix_; ++i) out.push_back(i);
  for (const auto& row : rows_) {
    if (is_unit(row)) out.push_back(row.lowest());
  }
  return out;
}

std::vector<PacketIndex> KnowledgeSpace::seen_set() const {
  std::vector<PacketIndex> out;
  for (PacketIndex i = 1; i <= prefix_; ++i) out.push_back(i);
  for (const auto& row : rows_) out.push_back(row.lowest());
  return out;
}

bool KnowledgeSpace::delivery_test(const CodedVector& v, PacketIndex n) const {
  assert(n == delivered_prefix() + 1);
  KnowledgeSpace copy = *this;
  copy.insert(v);
  return copy.is_decoded(n);
}

std::vector<CodedVector> KnowledgeSpace::basis() const {
  std::vector<CodedVector> out;
  out.reserve(rank());
  for (PacketIndex i = 1; i <= prefix_; ++i) out.push_back(CodedVector::unit(i));
  out.insert(out.end(), rows_.begin(), rows_.end());
  return out;
}

}  // namespace ncbcast
