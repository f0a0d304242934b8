#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace metronome {

// Seedable stream used for every stochastic draw in the simulator.
//
// The engine is std::mt19937_64 (the 64-bit Mersenne Twister, whose output
// sequence the C++ standard fixes for a given seed). The standard library
// distributions are implementation-defined, so the conversions below are
// spelled out to keep streams identical across toolchains:
//   uniform01    = (x >> 11) * 2^-53                      in [0, 1)
//   exponential  = -log(1 - uniform01) / rate
//   index(n)     = high 64 bits of x * n, with rejection   in [0, n)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

  // Unbiased draw in [0, n) via Lemire's multiply-shift with rejection.
  std::uint64_t index(std::uint64_t n) {
    auto m = static_cast<unsigned __int128>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(engine_()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; a stable 64-bit mixing function.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace metronome
