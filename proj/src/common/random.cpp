#include "chainfleet/common/random.hpp"

#include <cmath>
#include <numbers>

namespace chainfleet {

double NormalSampler::standard() {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const std::uint64_t x1 = engine_();
  const std::uint64_t x2 = engine_();
  const double u1 = static_cast<double>((x1 >> 11) + 1) * kScale;
  const double u2 = static_cast<double>(x2 >> 11) * kScale;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace chainfleet
