#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chainfleet/ledger/state.hpp"
#include "chainfleet/ledger/types.hpp"

namespace chainfleet::harness {

struct AuditCheck {
  std::string name;  // hash_chain, replay, no_lost_tx
  bool passed = false;
  std::string detail;
};

struct AuditReport {
  std::vector<AuditCheck> checks;

  bool passed() const;
  std::string to_text() const;  // one "PASS name: detail" / "FAIL name: detail" line per check
};

// object_id,category,x,y,z,sightings,detector,t_ms,version over every channel's object/ keys
void write_inventory_csv(std::ostream& out, const ledger::ChannelStates& states);

/// Audits block-log lines against the optional sibling artifacts of the same run.
///
/// hash_chain: every line decodes, numbering is contiguous per channel, each
///   block links to and re-hashes like its predecessor, and every tx_id equals
///   its transaction digest. Failures name the block.
/// replay: folding the blocks reproduces the commit statuses and the inventory rows.
/// no_lost_tx: every committed tx_id appears in the log and vice versa.
AuditReport audit_log_lines(std::span<const std::string> lines,
                            std::optional<std::span<const ledger::CommitRecord>> commits,
                            std::optional<std::string> inventory_csv);

/// Reads `blocklog`, plus commits.csv and inventory.csv from the same directory when present.
AuditReport audit_block_log(const std::filesystem::path& blocklog);

}  // namespace chainfleet::harness
