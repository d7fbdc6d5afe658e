#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace d2nn {

/// splitmix64 step; used to derive independent stream seeds from a base seed.
inline uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t mix_seed(uint64_t base, uint64_t salt0, uint64_t salt1 = 0) {
  uint64_t s = base;
  uint64_t z = splitmix64(s);
  s ^= salt0 + 0x9e3779b97f4a7c15ULL;
  z ^= splitmix64(s);
  s ^= salt1 + 0x7f4a7c159e3779b9ULL;
  z ^= splitmix64(s);
  return z;
}

/// Deterministic RNG with explicitly specified mappings to uniforms and gaussians,
/// so streams are reproducible across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (second value cached).
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi_ * u2);
    has_spare_ = true;
    return r * std::cos(kTwoPi_ * u2);
  }

  /// Uniform integer in [0, n), rejection-free modulo bias is negligible for n << 2^64.
  uint32_t below(uint32_t n) { return static_cast<uint32_t>(next_u64() % n); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = below(static_cast<uint32_t>(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static constexpr double kTwoPi_ = 6.283185307179586476925286766559;
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace d2nn
