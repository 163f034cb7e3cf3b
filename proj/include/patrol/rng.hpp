#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace patrol {

// All randomness in the library goes through this generator so that runs are
// reproducible bit-for-bit across platforms.  Standard-library distributions
// are implementation-defined and must not be used anywhere.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed plus stream/index tags.
/// Distinct (stream, index) pairs give decorrelated streams, so adding a
/// consumer (say one more sensor) never perturbs the draws of the others.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  std::uint64_t s = base;
  s = splitmix64(s) ^ (stream + 0x632be59bd9b4e019ull);
  s = splitmix64(s) ^ (index + 0x9e6c63d0876a9a47ull);
  return splitmix64(s);
}

// xoshiro256++ (Blackman and Vigna), state seeded through splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n); n > 0.  Rejection sampling, unbiased.
  std::uint32_t next_below(std::uint32_t n) {
    const std::uint64_t limit = 0x100000000ull - 0x100000000ull % n;
    for (;;) {
      const std::uint64_t x = next_u64() >> 32;
      if (x < limit) return static_cast<std::uint32_t>(x % n);
    }
  }

  /// Poisson-distributed count by inverse transform.  Consumes exactly one
  /// uniform draw per call regardless of the outcome.
  int next_poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double u = next_double();
    double p = std::exp(-mean);
    double cum = p;
    int k = 0;
    while (u >= cum && k < 1000000) {
      ++k;
      p *= mean / k;
      cum += p;
    }
    return k;
  }

  /// In-place Fisher-Yates shuffle (std::shuffle is implementation-defined).
  template <typename T>
  void shuffle(T* data, std::size_t n) {
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = next_below(static_cast<std::uint32_t>(i));
      T tmp = data[i - 1];
      data[i - 1] = data[j];
      data[j] = tmp;
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace patrol
