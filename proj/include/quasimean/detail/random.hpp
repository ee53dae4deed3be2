#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace quasimean::detail {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seeded stream with portable draws: std::mt19937_64 is fully specified, and
// the distributions below avoid the implementation-defined std ones.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) : gen_(splitmix64(seed ^ splitmix64(stream))) {}

  double uniform01() noexcept { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

  double log_uniform(double lo, double hi) noexcept {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  // Inclusive range.
  std::size_t index(std::size_t lo, std::size_t hi) noexcept {
    return lo + static_cast<std::size_t>(gen_() % (hi - lo + 1));
  }

  bool coin() noexcept { return (gen_() >> 63) != 0; }

  template <class T>
  void shuffle(std::vector<T>& v) noexcept {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(0, i - 1)]);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace quasimean::detail
