#pragma once

#include <cstdint>

namespace metronome {

// Simulator clock: integer nanoseconds since the start of a run.
using SimTime = std::uint64_t;
using SimDuration = std::uint64_t;

inline constexpr SimDuration kNanosPerMicro = 1'000;
inline constexpr SimDuration kNanosPerMilli = 1'000'000;
inline constexpr SimDuration kNanosPerSecond = 1'000'000'000;

constexpr SimDuration micros(std::uint64_t v) { return v * kNanosPerMicro; }
constexpr SimDuration millis(std::uint64_t v) { return v * kNanosPerMilli; }
constexpr SimDuration seconds(std::uint64_t v) { return v * kNanosPerSecond; }

constexpr double to_seconds(SimDuration d) {
  return static_cast<double>(d) / static_cast<double>(kNanosPerSecond);
}

constexpr double to_micros(SimDuration d) {
  return static_cast<double>(d) / static_cast<double>(kNanosPerMicro);
}

}  // namespace metronome
