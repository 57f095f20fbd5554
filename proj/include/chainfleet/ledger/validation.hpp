#pragma once

#include <set>
#include <string>
#include <vector>

#include "chainfleet/ledger/types.hpp"

namespace chainfleet::ledger {

/// Validates the block's transactions in order and applies the valid ones to `state`.
///
/// A transaction is invalidated when
///  - its tx_id was already committed (tracked in `committed_ids`),
///  - it carries no endorsement,
///  - a read-set version differs from the state as updated by earlier
///    transactions of the same block, or
///  - it writes a key already written earlier in this block without having
///    read that key at its current version (first writer wins).
std::vector<TxStatus> validate_and_apply(WorldState& state, const Block& block, std::set<std::string>& committed_ids);

}  // namespace chainfleet::ledger
