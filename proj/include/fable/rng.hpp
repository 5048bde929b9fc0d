// Deterministic random number generation.
//
// All stochastic code in the library draws from this wrapper instead of the
// <random> distribution templates.  mt19937_64 itself is specified bit-for-bit
// by the standard, but uniform_real_distribution / normal_distribution are
// not, and libstdc++ and libc++ produce different streams.  Mapping raw bits
// to doubles by hand keeps outputs byte-identical across toolchains, which
// the file-format and reproducibility contracts rely on.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fable {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1) with 53 random mantissa bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (cosine branch).  The log argument is
  // 1 - u in (0, 1], so it never sees zero.
  double gaussian() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return radius * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Uniform integer in [0, n).  n must be positive.  The floor-scale map is
  // negligibly biased for the small n used here and, unlike
  // uniform_int_distribution, identical on every platform.
  std::uint64_t index(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

 private:
  std::mt19937_64 engine_;
};

// Derives a child seed from a base seed and a stream id (splitmix64 finisher
// applied to their combination).  Used to give every grid cell, target draw,
// and noise candidate its own independent deterministic stream.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace fable
