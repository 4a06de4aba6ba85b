#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ncbcast/gf.hpp"
#include "ncbcast/linalg.hpp"
#include "ncbcast/random.hpp"

namespace ncbcast {

enum class CodingScheme { scheme_a, scheme_b, rlnc };

std::string_view to_string(CodingScheme scheme);
/// Accepts "a", "b", "rlnc" (case-sensitive). Throws std::invalid_argument.
CodingScheme parse_coding_scheme(std::string_view text);

/// What the coding block knows at the start of a slot.
///
/// Receiver spaces are the sender's copies, which equal the receivers' own
/// spaces under perfect feedback.
struct CodingInput {
  /// A(t): highest packet index passed into the queue so far.
  PacketIndex newest = 0;
  /// Packets currently in the transmission queue, ascending. Packets decoded
  /// by every receiver have left the queue.
  std::span<const PacketIndex> queued;
  std::span<const KnowledgeSpace> receivers;
  const FieldContext* field = nullptr;

  /// |V_s(t)|
  std::size_t transmission_list_size() const { return queued.size(); }
};

struct CodingOutput {
  CodedVector vector;
  std::size_t coded_packet_count = 0;
  /// |V*_s(t)|
  std::size_t effective_list_size = 0;
  /// Whole-vector draws RLNC needed before finding an innovative one.
  std::uint64_t draws = 0;
};

/// Receivers (by position) whose rank covers the whole transmission list.
std::vector<std::size_t> complete_receivers(const CodingInput& input);

/// Drop-when-seen: combines each incomplete receiver's oldest unseen packet,
/// oldest first, using the smallest coefficient that keeps the partial sum
/// innovative for the receivers waiting on that packet.
CodingOutput encode_scheme_a(const CodingInput& input);

/// Minimal combination of next-needed packets: starts from the newest one
/// and adds an older one only when a receiver waiting on it would otherwise
/// not get an innovative packet.
CodingOutput encode_scheme_b(const CodingInput& input);

/// Uniform random coefficients over the whole queue, redrawn until the
/// vector is innovative for every incomplete receiver.
CodingOutput encode_rlnc(const CodingInput& input, RandomStream& rng);

CodingOutput encode(CodingScheme scheme, const CodingInput& input, RandomStream& rng);

/// min(max_r rank_r + 1, A(t)) expressed as a queue length.
std::size_t effective_list_size_ab(const CodingInput& input);

}  // namespace ncbcast
