#pragma once

// Seeded shuffling with a fully specified generator so that splits and
// bootstrap resamples are reproducible across platforms and implementations.
//
// Generator: MT19937-64 (std::mt19937_64, whose output sequence is fixed by
// the C++ standard), seeded with the 64-bit seed value directly.
// Bounded draws: uniform_below(n) rejects raw outputs x >= 2^64 - (2^64 mod n)
// and returns x mod n.
// Shuffle: Fisher-Yates from the last index down; at index i the element is
// swapped with position uniform_below(i + 1).

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace coco {

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  std::uint64_t uniform_below(std::uint64_t n) {
    // 2^64 mod n computed without overflow
    const std::uint64_t rem = (0 - n) % n;
    const std::uint64_t limit = 0 - rem;  // 0 means the full range is usable
    for (;;) {
      const std::uint64_t x = engine_();
      if (limit == 0 || x < limit) return x % n;
    }
  }

  // Uniform real in [0, 1) from the top 53 bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace coco
