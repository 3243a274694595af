#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace multiop {

/// Deterministic random source for every stochastic choice in the library.
///
/// The raw 64-bit stream comes from std::mt19937_64, whose output sequence is
/// fixed by the standard, so it is identical across platforms. The real-valued
/// transforms below are spelled out by hand (instead of using the std
/// distributions, which are implementation-defined) so that a given seed
/// reproduces the same stream everywhere up to libm rounding.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; values are produced in pairs and the
  /// spare is cached, so draws consume the underlying stream two at a time.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps the log finite.
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Uniform integer in [lo, hi], inclusive. Rejection sampling, no modulo
  /// bias.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    auto range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0) return static_cast<std::int64_t>(next_u64()); // full range
    std::uint64_t threshold = (0 - range) % range;
    for (;;) {
      std::uint64_t x = next_u64();
      if (x >= threshold) return lo + static_cast<std::int64_t>(x % range);
    }
  }

  /// Fisher-Yates shuffle driven by this generator.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// Child generator for trial/cell/worker `index`. SplitMix64 finalizer over
  /// seed + odd*(index+1): distinct indexes give statistically independent
  /// children, and unlike plain XOR the derivation does not collide when
  /// children derive grandchildren. Output therefore never depends on how
  /// work is distributed over threads.
  Rng derive(std::uint64_t index) const {
    std::uint64_t z = seed_ + 0x9E3779B97F4A7C15ull * (index + 1);
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return Rng(z);
  }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace multiop
