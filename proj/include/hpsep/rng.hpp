#pragma once

#include <cstdint>

namespace hpsep {

/// splitmix64 generator. Small, fast, and identical on every platform, which
/// keeps generated corpora byte-reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Uniform integer in [lo, hi], inclusive.
  int range(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }

  bool chance(double p) { return unit() < p; }

  /// Derives the seed for sub-stream `index` of a master seed. Documented
  /// derivation: splitmix64 output of (master + (index+1) * golden gamma).
  static std::uint64_t derive(std::uint64_t master, std::uint64_t index) {
    Rng r(master + (index + 1) * 0x9E3779B97F4A7C15ull);
    return r.next_u64();
  }

 private:
  std::uint64_t state_;
};

}  // namespace hpsep
