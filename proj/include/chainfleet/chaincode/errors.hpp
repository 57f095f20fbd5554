#pragma once

#include <stdexcept>
#include <string>

namespace chainfleet::chaincode {

enum class ContractErrc {
  AlreadyExists,
  NotFound,
  TimestampRegression,
  OutOfRange,
  InvalidTransition,
  InvalidArgument,
  UnknownFunction,
  NonDeterministic,
};

const char* to_string(ContractErrc code);

/// Contract execution failure. A transaction whose execution throws is never ordered.
class ContractError : public std::runtime_error {
 public:
  ContractError(ContractErrc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ContractErrc code() const noexcept { return code_; }

 private:
  ContractErrc code_;
};

}  // namespace chainfleet::chaincode
