#pragma once

#include <cstdint>
#include <random>

namespace ncbcast {

/// SplitMix64 finalizer; used for every seed derivation in the project.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for repetition `run` of grid point `point` of an experiment seeded
/// with `seed`: splitmix64(splitmix64(splitmix64(seed) ^ run) ^ point).
constexpr std::uint64_t child_seed(std::uint64_t seed, std::uint64_t run, std::uint64_t point) {
  return splitmix64(splitmix64(splitmix64(seed) ^ run) ^ point);
}

/// Independent named streams spawned from one master seed.
enum class StreamId : std::uint64_t {
  rate_control = 1,
  coefficients = 2,
  channel_base = 1000,  // receiver r uses channel_base + r
};

constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream * 0xD1B54A32D192ED03ULL));
}

/// A deterministic random stream. Draws are derived from raw mt19937_64
/// output only, so sequences are identical across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t master, std::uint64_t stream) : engine_(stream_seed(master, stream)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  /// Uniform on [0, 2^bits), 1 <= bits <= 63.
  std::uint64_t bits(unsigned bits) { return engine_() >> (64 - bits); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ncbcast
