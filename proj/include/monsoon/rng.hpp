#pragma once

#include <cstdint>
#include <limits>

namespace monsoon {

// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based draw: a pure function of (seed, stream, counter, index).
/// Each lattice site gets its own value per sweep, so results do not depend
/// on the order or the thread in which sites are visited.
constexpr std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t stream,
                                     std::uint64_t counter,
                                     std::uint64_t index) {
  std::uint64_t h = mix64(seed ^ (stream * 0xd1b54a32d192ed03ULL));
  h = mix64(h ^ counter);
  return mix64(h ^ (index * 0x8cb92ba72f3d8dd7ULL));
}

/// Maps 64 random bits to a double in [0, 1).
constexpr double unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

constexpr double counter_uniform(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t counter, std::uint64_t index) {
  return unit_interval(counter_bits(seed, stream, counter, index));
}

/// Sequential generator satisfying UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() { return unit_interval((*this)()); }

  // Modulo bias is below 2^-50 for the label counts used here.
  std::uint64_t below(std::uint64_t n) { return (*this)() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace monsoon
