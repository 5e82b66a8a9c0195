#pragma once

// SplitMix64 (Steele, Lea and Flood). Bounded draws use `lo + next() % span`
// so that generated data depends only on the seed and the draw order.

#include <cstdint>
#include <stdexcept>

namespace qrobust {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform-ish integer in [lo, hi].
  std::int64_t draw(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw std::invalid_argument("empty draw range");
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
  }

 private:
  std::uint64_t state_;
};

}  // namespace qrobust
