#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

namespace chainfleet {

using Digest = std::array<std::uint8_t, 32>;

inline constexpr Digest kZeroDigest{};

Digest sha256(std::span<const std::uint8_t> data);
std::string digest_hex(const Digest& d);

}  // namespace chainfleet
