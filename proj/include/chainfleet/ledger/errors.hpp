#pragma once

#include <stdexcept>
#include <string>

namespace chainfleet::ledger {

enum class LedgerErrc {
  DuplicateIdentity,
  UnknownIdentity,
  DuplicateChannel,
  UnknownChannel,
  UnknownOrg,
  NotChannelMember,
  UnknownChaincode,
  DuplicateChaincode,
  BrokenChain,
  InvalidConfig,
};

const char* to_string(LedgerErrc code);

class LedgerError : public std::runtime_error {
 public:
  LedgerError(LedgerErrc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  LedgerErrc code() const noexcept { return code_; }

 private:
  LedgerErrc code_;
};

}  // namespace chainfleet::ledger
