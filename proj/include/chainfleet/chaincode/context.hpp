#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chainfleet/ledger/state.hpp"

namespace chainfleet::chaincode {

/// Execution context for one contract invocation.
///
/// Reads go to an immutable snapshot and are recorded with the version seen.
/// Writes are buffered; a later read of a written key returns the buffered
/// value without adding a read-set entry.
class TxContext {
 public:
  explicit TxContext(const ledger::StateView& snapshot) : snapshot_(snapshot) {}

  std::optional<std::string> get_state(const std::string& key);
  void put_state(const std::string& key, std::string value);
  // Snapshot entries under prefix merged with buffered writes, key order. Every snapshot hit is recorded as a read.
  std::vector<std::pair<std::string, std::string>> scan(std::string_view prefix);
  // Version of the key in the snapshot (0 when absent); not recorded.
  std::uint64_t snapshot_version(std::string_view key) const;

  std::vector<ledger::ReadEntry> read_set() const;
  std::vector<ledger::WriteEntry> write_set() const;

 private:
  const ledger::StateView& snapshot_;
  std::map<std::string, std::uint64_t, std::less<>> reads_;
  std::map<std::string, std::string, std::less<>> writes_;
};

}  // namespace chainfleet::chaincode
