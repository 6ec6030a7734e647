#pragma once
// Seeded RNG with hand-rolled distributions so that streams are identical
// across standard-library implementations (std::uniform_real_distribution
// et al. are not portable bit-for-bit).

#include <cstdint>
#include <random>
#include <vector>

namespace hullfit {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (one value per call, no caching).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  // Uniform integer in [0, n) by rejection, unbiased.
  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = gen_();
    while (x >= limit) x = gen_();
    return x % n;
  }

  bool coin() { return (gen_() & 1u) != 0; }

  std::uint64_t raw() { return gen_(); }

  // -1 or +1 with equal probability (Rademacher draw).
  double sign() { return coin() ? 1.0 : -1.0; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[index(i)]);
  }

  // Child stream for a subtask; mixes the label in via splitmix64 so that
  // children with different labels are decorrelated.
  Rng child(std::uint64_t label) {
    std::uint64_t z = gen_() + 0x9e3779b97f4a7c15ull + label;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return Rng(z ^ (z >> 31));
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace hullfit
