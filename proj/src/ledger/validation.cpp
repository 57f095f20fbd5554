#include "chainfleet/ledger/validation.hpp"

#include <algorithm>

namespace chainfleet::ledger {

std::vector<TxStatus> validate_and_apply(WorldState& state, const Block& block, std::set<std::string>& committed_ids) {
  std::vector<TxStatus> statuses;
  statuses.reserve(block.txs.size());
  std::set<std::string, std::less<>> written_in_block;

  for (const auto& tx : block.txs) {
    bool valid = !tx.endorsements.empty() && !committed_ids.contains(tx.tx_id);

    for (const auto& read : tx.read_set) {
      if (!valid) break;
      valid = state.version(read.key) == read.version;
    }
    for (const auto& write : tx.write_set) {
      if (!valid) break;
      if (!written_in_block.contains(write.key)) continue;
      const bool observed = std::any_of(tx.read_set.begin(), tx.read_set.end(), [&](const ReadEntry& r) {
        return r.key == write.key && r.version == state.version(write.key);
      });
      valid = observed;
    }

    if (valid) {
      for (const auto& write : tx.write_set) {
        state.apply(write);
        written_in_block.insert(write.key);
      }
    }
    committed_ids.insert(tx.tx_id);
    statuses.push_back(valid ? TxStatus::Valid : TxStatus::Invalidated);
  }
  return statuses;
}

}  // namespace chainfleet::ledger
