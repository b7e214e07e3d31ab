#pragma once

#include <cstdint>

namespace rearr {

/// SplitMix64 (Steele, Lea, Flood 2014). The output stream is fully
/// specified by the 64-bit state, so instance streams are identical on
/// every platform. Doubles are built from the top 53 bits.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next() % span);
  }

  bool chance(double p) { return uniform() < p; }

  /// Independent generator for substream `index`.
  SplitMix64 split(std::uint64_t index) const {
    SplitMix64 mixer(state_ ^ (0x632be59bd9b4e019ULL * (index + 1)));
    return SplitMix64(mixer.next());
  }

 private:
  std::uint64_t state_;
};

}  // namespace rearr
