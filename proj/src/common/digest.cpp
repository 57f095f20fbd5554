#include "chainfleet/common/digest.hpp"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

#include "chainfleet/common/bytes.hpp"

namespace chainfleet {

Digest sha256(std::span<const std::uint8_t> data) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size()) {
    throw std::runtime_error("sha256 failed");
  }
  return out;
}

std::string digest_hex(const Digest& d) { return to_hex(d); }

}  // namespace chainfleet
