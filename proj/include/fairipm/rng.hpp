#ifndef FAIRIPM_RNG_HPP
#define FAIRIPM_RNG_HPP

#include <array>
#include <cstdint>
#include <cstddef>
#include <span>
#include <utility>

namespace fairipm {

// Deterministic 64-bit generator: xoshiro256++ seeded through splitmix64.
// Sequences are identical across platforms for a given seed, which every
// reproducibility guarantee in this library relies on.
inline uint64_t splitmix64_next(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in [0, n).
  uint64_t below(uint64_t n) {
    // Rejection sampling keeps the draw exactly uniform.
    const uint64_t limit = n * (UINT64_MAX / n);
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x / (UINT64_MAX / n);
  }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // Independent child generator; index selects the stream.
  Rng spawn(uint64_t index) const {
    uint64_t sm = state_[0] ^ (0xa0761d6478bd642fULL + index);
    return Rng(splitmix64_next(sm));
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<uint64_t, 4> state_{};
};

}  // namespace fairipm

#endif
