#pragma once

#include <cmath>
#include <cstdint>

namespace swl {

/// Counter-based generator: the i-th draw of stream (seed, stream) is
/// splitmix64(seed ^ mix(stream) + i * golden). Results depend only on the
/// triple (seed, stream, i), never on call order or thread schedule, which
/// keeps random suites bit-identical across platforms.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(seed ^ mix(stream + 0x632be59bd9b4e019ULL)) {}

  std::uint64_t bits(std::uint64_t counter) const { return mix(key_ + counter * kGolden); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
  }

  // Sequential convenience interface over the same counter space.
  double next() { return uniform(cursor_++); }
  double next(double lo, double hi) { return uniform(cursor_++, lo, hi); }
  std::uint64_t next_bits() { return bits(cursor_++); }
  std::uint64_t next_index(std::uint64_t bound) { return next_bits() % bound; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t cursor_ = 0;
};

}  // namespace swl
