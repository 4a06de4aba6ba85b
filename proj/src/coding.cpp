#include "ncbcast/coding.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace ncbcast {

namespace {

constexpr std::uint64_t kMaxRlncDraws = 1'000'000;

std::vector<std::size_t> incomplete_receivers(const CodingInput& input) {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < input.receivers.size(); ++r) {
    if (input.receivers[r].rank() < input.newest) out.push_back(r);
  }
  if (out.empty()) throw std::logic_error("coding block called with every receiver complete");
  return out;
}

CodingOutput finish(CodedVector v, std::size_t effective) {
  CodingOutput out;
  out.coded_packet_count = v.nonzero_count();
  out.effective_list_size = effective;
  out.vector = std::move(v);
  return out;
}

}  // namespace

std::string_view to_string(CodingScheme scheme) {
  switch (scheme) {
    case CodingScheme::scheme_a: return "a";
    case CodingScheme::scheme_b: return "b";
    case CodingScheme::rlnc: return "rlnc";
  }
  return "?";
}

CodingScheme parse_coding_scheme(std::string_view text) {
  if (text == "a") return CodingScheme::scheme_a;
  if (text == "b") return CodingScheme::scheme_b;
  if (text == "rlnc") return CodingScheme::rlnc;
  throw std::invalid_argument("unknown coding scheme '" + std::string(text) + "'");
}

std::vector<std::size_t> complete_receivers(const CodingInput& input) {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < input.receivers.size(); ++r) {
    if (input.receivers[r].rank() >= input.newest) out.push_back(r);
  }
  return out;
}

std::size_t effective_list_size_ab(const CodingInput& input) {
  std::size_t max_rank = 0;
  for (const auto& space : input.receivers) max_rank = std::max(max_rank, space.rank());
  const PacketIndex removed = input.newest - input.queued.size();
  const PacketIndex bound = std::min<PacketIndex>(max_rank + 1, input.newest);
  return static_cast<std::size_t>(bound - removed);
}

CodingOutput encode_scheme_a(const CodingInput& input) {
  const FieldContext& field = *input.field;
  std::map<PacketIndex, std::vector<std::size_t>> by_unseen;
  for (std::size_t r : incomplete_receivers(input)) {
    by_unseen[input.receivers[r].oldest_unseen()].push_back(r);
  }

  CodedVector v;
  for (const auto& [packet, group] : by_unseen) {
    // Every packet older than `packet` is seen by this group, so the
    // residual at `packet` is final: it equals base + c and later (newer)
    // additions cannot change it.
    std::vector<FieldElement> forbidden;
    forbidden.reserve(group.size());
    for (std::size_t r : group) forbidden.push_back(input.receivers[r].reduce(v).at(packet));

    bool chosen = false;
    for (unsigned step = 1; step <= field.size() && !chosen; ++step) {
      const FieldElement c(step % field.size());  // 1, 2, ..., M-1, then 0
      if (std::find(forbidden.begin(), forbidden.end(), c) != forbidden.end()) continue;
      v.set(packet, c);
      chosen = true;
    }
    if (!chosen) throw std::logic_error("no innovative coefficient exists; field too small");
  }
  return finish(std::move(v), effective_list_size_ab(input));
}

CodingOutput encode_scheme_b(const CodingInput& input) {
  const FieldContext& field = *input.field;
  std::map<PacketIndex, std::vector<std::size_t>, std::greater<>> by_needed;
  for (std::size_t r : incomplete_receivers(input)) {
    by_needed[input.receivers[r].next_needed()].push_back(r);
  }

  auto it = by_needed.begin();
  CodedVector v = CodedVector::unit(it->first);
  for (++it; it != by_needed.end(); ++it) {
    const auto& [packet, group] = *it;
    const bool needed = std::any_of(group.begin(), group.end(), [&](std::size_t r) {
      return !input.receivers[r].is_innovative(v);
    });
    if (!needed) continue;

    bool chosen = false;
    for (unsigned value = 1; value < field.size() && !chosen; ++value) {
      CodedVector candidate = v;
      candidate.set(packet, FieldElement(value));
      const bool ok = std::all_of(group.begin(), group.end(), [&](std::size_t r) {
        return input.receivers[r].is_innovative(candidate);
      });
      if (ok) {
        v = std::move(candidate);
        chosen = true;
      }
    }
    if (!chosen) throw std::logic_error("no innovative coefficient exists; field too small");
  }
  return finish(std::move(v), effective_list_size_ab(input));
}

CodingOutput encode_rlnc(const CodingInput& input, RandomStream& rng) {
  const FieldContext& field = *input.field;
  const auto incomplete = incomplete_receivers(input);
  const PacketIndex first = input.queued.front();
  const PacketIndex last = input.queued.back();

  std::vector<FieldElement> coeffs(last - first + 1);
  for (std::uint64_t draw = 1; draw <= kMaxRlncDraws; ++draw) {
    std::fill(coeffs.begin(), coeffs.end(), FieldElement{});
    for (PacketIndex p : input.queued) {
      coeffs[p - first] = FieldElement(static_cast<unsigned>(rng.bits(field.exponent())));
    }
    CodedVector v = CodedVector::dense(coeffs, first);
    const bool ok = std::all_of(incomplete.begin(), incomplete.end(), [&](std::size_t r) {
      return input.receivers[r].is_innovative(v);
    });
    if (ok) {
      CodingOutput out = finish(std::move(v), input.transmission_list_size());
      out.draws = draw;
      return out;
    }
  }
  throw std::logic_error("RLNC failed to find an innovative combination");
}

CodingOutput encode(CodingScheme scheme, const CodingInput& input, RandomStream& rng) {
  switch (scheme) {
    case CodingScheme::scheme_a: return encode_scheme_a(input);
    case CodingScheme::scheme_b: return encode_scheme_b(input);
    case CodingScheme::rlnc: return encode_rlnc(input, rng);
  }
  throw std::invalid_argument("unknown coding scheme");
}

}  // namespace ncbcast
