#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "chainfleet/chaincode/contract.hpp"
#include "chainfleet/ledger/orderer.hpp"
#include "chainfleet/ledger/types.hpp"

namespace chainfleet::ledger {

/// Membership table: who may submit, and on behalf of which organization.
class IdentityRegistry {
 public:
  const Identity& add(std::string org_id, std::string member_id, Role role);
  const Identity* find(std::string_view org_id, std::string_view member_id) const;
  bool contains(const Identity& id) const;
  bool has_org(std::string_view org_id) const;

 private:
  std::map<std::pair<std::string, std::string>, Identity, std::less<>> members_;
};

using CommitListener = std::function<void(const CommitRecord&)>;

/// Single-process permissioned ledger: one ordering service, one peer view
/// per channel.
///
/// Contracts execute at submission against the committed state overlaid with
/// the write sets of transactions that are ordered but not yet committed.
/// Execution order equals ordering order, so a steady stream of dependent
/// submissions (e.g. an append-only path log) validates without conflicts;
/// MVCC validation at commit still rejects anything that went stale.
///
/// All public members are safe to call concurrently. Commit listeners run on
/// the committing thread after the internal lock is released.
class Ledger {
 public:
  explicit Ledger(LedgerConfig config);
  ~Ledger();
  Ledger(const Ledger&) = delete;
  Ledger& operator=(const Ledger&) = delete;

  const LedgerConfig& config() const { return config_; }

  Identity register_identity(const std::string& org_id, const std::string& member_id, Role role);

  void create_channel(const std::string& name, const std::vector<std::string>& member_orgs, Millis now = Millis{0});

  // Install/approve/commit collapsed into one call.
  void install_chaincode(const std::string& channel, const std::string& name,
                         std::shared_ptr<const chaincode::Contract> contract);

  // Executes the contract and enqueues the transaction; commit happens later.
  // Throws LedgerError, or chaincode::ContractError when execution fails.
  std::string submit(const Identity& creator, const std::string& channel, const std::string& chaincode,
                     const std::string& function, const std::vector<std::string>& args, Millis now);

  // Read-only invocation against committed state; nothing is ordered.
  std::string evaluate(const Identity& creator, const std::string& channel, const std::string& chaincode,
                       const std::string& function, const std::vector<std::string>& args) const;

  // Cuts due blocks on every channel. They stay queued for commit_block/advance.
  std::vector<Block> tick_orderer(Millis now);

  // Validates and applies one block. Throws LedgerError(BrokenChain) on a numbering or hash mismatch.
  std::vector<CommitRecord> commit_block(const std::string& channel, const Block& block, Millis now);

  // Cuts due blocks and commits every cut block whose cut_time + validation_budget <= now,
  // stamping commit_time = cut_time + validation_budget.
  std::vector<CommitRecord> advance(Millis now);

  // nullopt when the key is absent. Throws LedgerError(UnknownChannel).
  std::optional<VersionedValue> query_state(const std::string& channel, const std::string& key) const;

  void subscribe(CommitListener listener);

  std::vector<Block> blocks(const std::string& channel) const;
  std::vector<Block> all_blocks() const;  // channel name order, then block number
  std::vector<CommitRecord> commit_records() const;
  ChannelStates world_states() const;
  std::size_t queue_length(const std::string& channel) const;
  std::size_t max_queue_length(const std::string& channel) const;
  // Transactions submitted but not yet committed.
  std::size_t pending_count() const;
  std::uint64_t submitted_count() const;

 private:
  class Overlay;
  struct Channel;

  Channel& channel_locked(const std::string& name);
  const Channel& channel_locked(const std::string& name) const;
  std::vector<CommitRecord> commit_locked(Channel& ch, const Block& block, Millis now);
  void notify(const std::vector<CommitRecord>& records) const;

  LedgerConfig config_;
  mutable std::mutex mu_;
  IdentityRegistry registry_;
  std::map<std::string, std::unique_ptr<Channel>, std::less<>> channels_;
  std::vector<CommitRecord> records_;
  std::vector<CommitListener> listeners_;
  std::uint64_t next_nonce_ = 0;
};

}  // namespace chainfleet::ledger
