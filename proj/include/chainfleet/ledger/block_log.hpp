#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chainfleet/ledger/types.hpp"

namespace chainfleet::ledger {

/// One block per line: the canonical block serialization, lowercase hex.
std::string to_log_line(const Block& block);
// Throws DecodeError.
Block from_log_line(std::string_view line);

void write_block_log(std::ostream& out, std::span<const Block> blocks);
std::vector<std::string> read_log_lines(std::istream& in);

struct ReplayResult {
  ChannelStates states;
  // Per block, per transaction, in log order.
  std::vector<std::vector<TxStatus>> statuses;
};

/// Folds blocks over empty state with the same validation the live peer uses.
/// Genesis blocks (no transactions) only declare their channel.
ReplayResult replay(std::span<const Block> blocks);

}  // namespace chainfleet::ledger
