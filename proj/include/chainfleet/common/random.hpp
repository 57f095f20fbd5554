#pragma once

#include <cstdint>
#include <random>

namespace chainfleet {

/// Seeded Gaussian stream with a fixed, portable algorithm.
///
/// Each draw consumes exactly two outputs x1, x2 of std::mt19937_64 and
/// applies Box-Muller without caching the second variate:
///   u1 = ((x1 >> 11) + 1) * 2^-53        in (0, 1]
///   u2 = (x2 >> 11) * 2^-53              in [0, 1)
///   z  = sqrt(-2 ln u1) * cos(2 pi u2)
/// std::normal_distribution is not used because its algorithm differs
/// between standard libraries.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

  double standard();
  double operator()(double mean, double sigma) { return mean + sigma * standard(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; derives independent stream seeds from one scenario seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace chainfleet
