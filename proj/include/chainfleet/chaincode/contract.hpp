#pragma once

#include <span>
#include <string>
#include <string_view>

#include "chainfleet/chaincode/context.hpp"

namespace chainfleet::chaincode {

/// A deterministic smart contract. Implementations must not consult clocks,
/// randomness or any state outside the context; time arrives as an argument.
class Contract {
 public:
  virtual ~Contract() = default;

  // Returns the function's payload (often empty for writes). Throws ContractError.
  virtual std::string invoke(TxContext& ctx, std::string_view function, std::span<const std::string> args) const = 0;
};

}  // namespace chainfleet::chaincode
