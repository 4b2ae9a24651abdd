#ifndef POLARQKD_RNG_HPP
#define POLARQKD_RNG_HPP

#include <cstdint>

namespace polarqkd {

// Deterministic pseudo-random stream: xoshiro256** seeded through splitmix64.
// The algorithm is fixed so that identical seeds produce identical sequences
// on every platform. Streams are single-owner; parallel code derives child
// streams with derive_seed(master, index) instead of sharing one stream.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) {
    std::uint64_t z = seed;
    for (auto& word : state_) {
      word = splitmix64(z);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53 bits of precision.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), unbiased by rejection.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  int next_bit() { return static_cast<int>(next_u64() >> 63); }

  static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    return splitmix64(z);
  }

  RandomStream child(std::uint64_t index) const {
    return RandomStream(derive_seed(state_[0] ^ state_[3], index));
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& z) {
    z += 0x9E3779B97F4A7C15ULL;
    std::uint64_t x = z;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
};

}  // namespace polarqkd

#endif  // POLARQKD_RNG_HPP
