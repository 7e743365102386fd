#pragma once

#include <cmath>
#include <cstdint>

#include "prodsys/geometry.hpp"

namespace prodsys {

// SplitMix64 generator. Self-contained so that streams are bit-identical
// across platforms and standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  double normal() {
    const double u1 = 1.0 - u01();  // (0, 1]
    const double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  int uniform_int(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

 private:
  std::uint64_t state_;
};

// Independent stream for a (base seed, cell index) pair.
inline Rng derive_rng(std::uint64_t base_seed, std::uint64_t cell) {
  Rng mix(base_seed * 0x9e3779b97f4a7c15ULL + cell + 1);
  const std::uint64_t s = mix.next() ^ (cell * 0xd1342543de82ef95ULL);
  return Rng(s);
}

}  // namespace prodsys
