#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>

namespace sweepsim {

/// splitmix64 finalizer; good avalanche, used only for seed derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stable per-replicate seed. Depends only on (master, index), never on
/// scheduling, so replicate j's outcome is identical for any worker count.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ mix64(index + 0x6a09e667f3bcc909ULL));
}

/// mt19937_64 behind helpers that avoid the implementation-defined std
/// distributions: output is a pure function of the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  /// Uniform on (0,1); never returns an endpoint, so -log(u) is finite.
  double uniform() { return static_cast<double>((next() >> 11) + 0.5) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Unbiased integer in [0, n); bitmask rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t mask = ~std::uint64_t{0} >> std::countl_zero((n - 1) | 1);
    std::uint64_t x;
    do {
      x = next() & mask;
    } while (x >= n);
    return x;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace sweepsim
