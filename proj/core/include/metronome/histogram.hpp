#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <utility>

namespace metronome {

// Log-spaced histogram over non-negative integers (nanoseconds): values
// 0..3 get their own bins, then every octave is split into four equal
// sub-bins. The last bin is open-ended, so every value lands somewhere.
class LogHistogram {
 public:
  static constexpr int kMaxOctave = 40;
  static constexpr std::size_t kBins = 4 + (kMaxOctave - 1) * 4 + 1;

  static std::size_t bin_of(std::uint64_t v) {
    if (v < 4) return static_cast<std::size_t>(v);
    const int msb = std::bit_width(v) - 1;
    if (msb > kMaxOctave) return kBins - 1;
    const auto sub = static_cast<std::size_t>((v >> (msb - 2)) & 3);
    return 4 + static_cast<std::size_t>(msb - 2) * 4 + sub;
  }

  // [lo, hi) of bin i; hi of the last bin is UINT64_MAX.
  static std::pair<std::uint64_t, std::uint64_t> edges(std::size_t i) {
    if (i < 4) return {i, i + 1};
    if (i == kBins - 1) return {std::uint64_t{1} << (kMaxOctave + 1), UINT64_MAX};
    const std::size_t j = i - 4;
    const int shift = static_cast<int>(j / 4);
    const std::uint64_t sub = j % 4;
    return {(4 + sub) << shift, (5 + sub) << shift};
  }

  void add(std::uint64_t v) {
    ++counts_[bin_of(v)];
    ++total_;
  }

  std::uint64_t count(std::size_t i) const { return counts_[i]; }
  std::uint64_t total() const { return total_; }

  // Smallest bin upper edge covering the q-quantile.
  std::uint64_t quantile_upper(double q) const;

  friend bool operator==(const LogHistogram&, const LogHistogram&) = default;

 private:
  std::array<std::uint64_t, kBins> counts_{};
  std::uint64_t total_ = 0;
};

inline std::uint64_t LogHistogram::quantile_upper(double q) const {
  if (total_ == 0) return 0;
  const auto target = static_cast<std::uint64_t>(q * static_cast<double>(total_));
  std::uint64_t seen = 0;
  for (std::size_t i = 0; i < kBins; ++i) {
    seen += counts_[i];
    if (seen > target || seen == total_) return edges(i).second;
  }
  return edges(kBins - 1).second;
}

}  // namespace metronome
