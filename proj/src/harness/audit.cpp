#include "chainfleet/harness/audit.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "chainfleet/chaincode/records.hpp"
#include "chainfleet/common/bytes.hpp"
#include "chainfleet/common/digest.hpp"
#include "chainfleet/common/text.hpp"
#include "chainfleet/harness/stats.hpp"
#include "chainfleet/ledger/block_log.hpp"

namespace chainfleet::harness {

bool AuditReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.passed; });
}

std::string AuditReport::to_text() const {
  std::string out;
  for (const auto& c : checks) out += std::string(c.passed ? "PASS " : "FAIL ") + c.name + ": " + c.detail + "\n";
  return out;
}

void write_inventory_csv(std::ostream& out, const ledger::ChannelStates& states) {
  out << "object_id,category,x,y,z,sightings,detector,t_ms,version\n";
  for (const auto& [channel, state] : states) {
    for (const auto& [key, value] : state.scan(chaincode::kObjectPrefix)) {
      const auto r = chaincode::Document::parse(value.value).get<chaincode::ObjectRecord>();
      out << r.object_id << ',' << r.category << ',' << format_double(r.x) << ',' << format_double(r.y) << ','
          << format_double(r.z) << ',' << r.sightings << ',' << r.detector << ',' << r.t << ',' << value.version
          << '\n';
    }
  }
}

namespace {

std::string block_label(const ledger::Block& b) { return b.channel + " block " + std::to_string(b.number); }

AuditCheck check_hash_chain(std::span<const std::string> lines, std::vector<ledger::Block>& blocks) {
  AuditCheck check{"hash_chain", false, {}};
  std::map<std::string, std::pair<std::uint64_t, Digest>, std::less<>> tip;  // channel -> next number, prev hash
  auto fail = [&](const std::string& where, std::size_t line, const std::string& problem) {
    check.detail = "failure at " + where + " (line " + std::to_string(line + 1) + "): " + problem;
    return check;
  };
  for (std::size_t i = 0; i < lines.size(); ++i) {
    // Position expected from the intact prefix; corrupted bytes cannot be trusted to name themselves.
    const std::string where =
        blocks.empty() ? "block 0" : blocks.back().channel + " block " + std::to_string(blocks.back().number + 1);
    ledger::Block block;
    try {
      block = ledger::from_log_line(lines[i]);
    } catch (const std::exception& e) {
      return fail(where, i, std::string("does not decode: ") + e.what());
    }
    auto [it, fresh] = tip.try_emplace(block.channel, 0, kZeroDigest);
    const auto& [expected_number, prev] = it->second;
    if (block.number != expected_number) {
      return fail(where, i, "block number " + std::to_string(block.number) + " out of sequence");
    }
    if (block.prev_hash != prev) return fail(block_label(block), i, "prev_hash does not match the previous block");
    if (ledger::block_hash(block) != block.hash) return fail(block_label(block), i, "stored hash does not match contents");
    for (const auto& tx : block.txs) {
      if (digest_hex(ledger::transaction_digest(tx)) != tx.tx_id) {
        return fail(block_label(block), i, "tx " + tx.tx_id + " does not match its digest");
      }
    }
    it->second = {block.number + 1, block.hash};
    blocks.push_back(std::move(block));
  }
  check.passed = true;
  check.detail = std::to_string(blocks.size()) + " blocks linked";
  return check;
}

AuditCheck check_replay(std::span<const ledger::Block> blocks,
                        std::optional<std::span<const ledger::CommitRecord>> commits,
                        const std::optional<std::string>& inventory_csv) {
  AuditCheck check{"replay", false, {}};
  const auto result = ledger::replay(blocks);

  if (commits) {
    std::map<std::string_view, ledger::TxStatus> recorded;
    for (const auto& c : *commits) recorded.emplace(c.tx_id, c.status);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      for (std::size_t t = 0; t < blocks[b].txs.size(); ++t) {
        auto it = recorded.find(blocks[b].txs[t].tx_id);
        if (it != recorded.end() && it->second != result.statuses[b][t]) {
          check.detail = "tx " + blocks[b].txs[t].tx_id + " replays as " + ledger::to_string(result.statuses[b][t]) +
                         " but was recorded " + ledger::to_string(it->second);
          return check;
        }
      }
    }
  }
  if (inventory_csv) {
    std::ostringstream rendered;
    write_inventory_csv(rendered, result.states);
    if (rendered.str() != *inventory_csv) {
      check.detail = "replayed inventory differs from inventory.csv";
      return check;
    }
  }
  check.passed = true;
  std::size_t keys = 0;
  for (const auto& [_, s] : result.states) keys += s.size();
  check.detail = std::to_string(keys) + " keys rebuilt" + (commits ? ", statuses match" : "") +
                 (inventory_csv ? ", inventory matches" : "");
  return check;
}

AuditCheck check_no_lost_tx(std::span<const ledger::Block> blocks,
                            std::optional<std::span<const ledger::CommitRecord>> commits) {
  AuditCheck check{"no_lost_tx", false, {}};
  if (!commits) {
    check.passed = true;
    check.detail = "skipped, no commits.csv";
    return check;
  }
  std::set<std::string_view> logged;
  for (const auto& b : blocks) {
    for (const auto& tx : b.txs) logged.insert(tx.tx_id);
  }
  std::set<std::string_view> recorded;
  for (const auto& c : *commits) {
    recorded.insert(c.tx_id);
    if (!logged.contains(c.tx_id)) {
      check.detail = "tx " + c.tx_id + " committed but missing from the block log";
      return check;
    }
  }
  for (auto id : logged) {
    if (!recorded.contains(id)) {
      check.detail = "tx " + std::string(id) + " in the block log but not in commits.csv";
      return check;
    }
  }
  check.passed = true;
  check.detail = std::to_string(recorded.size()) + " transactions accounted for";
  return check;
}

}  // namespace

AuditReport audit_log_lines(std::span<const std::string> lines,
                            std::optional<std::span<const ledger::CommitRecord>> commits,
                            std::optional<std::string> inventory_csv) {
  AuditReport report;
  std::vector<ledger::Block> blocks;
  report.checks.push_back(check_hash_chain(lines, blocks));
  if (!report.checks.back().passed) {
    report.checks.push_back({"replay", false, "not attempted, hash chain broken"});
    report.checks.push_back(check_no_lost_tx(blocks, std::nullopt));
    report.checks.back().passed = false;
    report.checks.back().detail = "not attempted, hash chain broken";
    return report;
  }
  report.checks.push_back(check_replay(blocks, commits, inventory_csv));
  report.checks.push_back(check_no_lost_tx(blocks, commits));
  return report;
}

AuditReport audit_block_log(const std::filesystem::path& blocklog) {
  std::ifstream in(blocklog);
  if (!in) throw std::runtime_error("cannot open " + blocklog.string());
  const auto lines = ledger::read_log_lines(in);

  const auto dir = blocklog.parent_path();
  std::optional<std::vector<ledger::CommitRecord>> commits;
  if (std::ifstream c(dir / "commits.csv"); c) commits = read_commits_csv(c);
  std::optional<std::string> inventory;
  if (std::ifstream inv(dir / "inventory.csv"); inv) {
    std::ostringstream text;
    text << inv.rdbuf();
    inventory = text.str();
  }
  std::optional<std::span<const ledger::CommitRecord>> view;
  if (commits) view = std::span<const ledger::CommitRecord>(*commits);
  return audit_log_lines(lines, view, inventory);
}

}  // namespace chainfleet::harness
