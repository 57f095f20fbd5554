#include "chainfleet/ledger/ledger.hpp"

#include <algorithm>

#include "chainfleet/chaincode/errors.hpp"
#include "chainfleet/ledger/errors.hpp"
#include "chainfleet/ledger/validation.hpp"

namespace chainfleet::ledger {

const Identity& IdentityRegistry::add(std::string org_id, std::string member_id, Role role) {
  auto key = std::make_pair(org_id, member_id);
  if (members_.contains(key)) {
    throw LedgerError(LedgerErrc::DuplicateIdentity, org_id + "/" + member_id);
  }
  auto [it, _] = members_.emplace(std::move(key), Identity{std::move(org_id), std::move(member_id), role});
  return it->second;
}

const Identity* IdentityRegistry::find(std::string_view org_id, std::string_view member_id) const {
  auto it = members_.find(std::make_pair(std::string(org_id), std::string(member_id)));
  return it == members_.end() ? nullptr : &it->second;
}

bool IdentityRegistry::contains(const Identity& id) const {
  const auto* found = find(id.org_id, id.member_id);
  return found != nullptr && *found == id;
}

bool IdentityRegistry::has_org(std::string_view org_id) const {
  return std::any_of(members_.begin(), members_.end(), [&](const auto& kv) { return kv.first.first == org_id; });
}

/// Committed state plus the writes of ordered-but-uncommitted transactions.
class Ledger::Overlay final : public StateView {
 public:
  explicit Overlay(const WorldState& base) : base_(base) {}

  std::optional<VersionedValue> get(std::string_view key) const override {
    if (auto it = pending_.find(key); it != pending_.end()) return it->second;
    return base_.get(key);
  }

  std::vector<std::pair<std::string, VersionedValue>> scan(std::string_view prefix) const override {
    auto base = base_.scan(prefix);
    std::map<std::string, VersionedValue, std::less<>> merged(base.begin(), base.end());
    for (auto it = pending_.lower_bound(prefix);
         it != pending_.end() && std::string_view(it->first).starts_with(prefix); ++it) {
      merged[it->first] = it->second;
    }
    return {merged.begin(), merged.end()};
  }

  void apply(const std::vector<WriteEntry>& writes) {
    for (const auto& w : writes) {
      const auto current = get(w.key);
      pending_[w.key] = VersionedValue{w.value, (current ? current->version : 0) + 1};
    }
  }

  void clear() { pending_.clear(); }

 private:
  const WorldState& base_;
  std::map<std::string, VersionedValue, std::less<>> pending_;
};

struct Ledger::Channel {
  Channel(std::string n, std::set<std::string, std::less<>> orgs, const Block& genesis, const LedgerConfig& cfg)
      : name(std::move(n)),
        members(std::move(orgs)),
        orderer(name, cfg.batch_size, cfg.batch_timeout, genesis),
        overlay(state) {
    committed.push_back(genesis);
  }

  std::string name;
  std::set<std::string, std::less<>> members;
  std::map<std::string, std::shared_ptr<const chaincode::Contract>, std::less<>> chaincodes;
  Orderer orderer;
  std::deque<Block> cut_pending;  // cut by the orderer, not yet committed
  std::vector<Block> committed;
  WorldState state;
  Overlay overlay;
  std::set<std::string> committed_ids;

  void rebuild_overlay() {
    overlay.clear();
    for (const auto& block : cut_pending) {
      for (const auto& tx : block.txs) overlay.apply(tx.write_set);
    }
    for (const auto& tx : orderer.queue()) overlay.apply(tx.write_set);
  }
};

Ledger::Ledger(LedgerConfig config) : config_(std::move(config)) { config_.validate(); }

Ledger::~Ledger() = default;

Identity Ledger::register_identity(const std::string& org_id, const std::string& member_id, Role role) {
  std::lock_guard lock(mu_);
  return registry_.add(org_id, member_id, role);
}

void Ledger::create_channel(const std::string& name, const std::vector<std::string>& member_orgs, Millis now) {
  std::lock_guard lock(mu_);
  if (channels_.contains(name)) throw LedgerError(LedgerErrc::DuplicateChannel, name);
  if (member_orgs.empty()) throw LedgerError(LedgerErrc::UnknownOrg, "channel " + name + " has no member orgs");
  for (const auto& org : member_orgs) {
    if (!registry_.has_org(org)) throw LedgerError(LedgerErrc::UnknownOrg, org);
  }
  Block genesis;
  genesis.channel = name;
  genesis.number = 0;
  genesis.cut_time = now;
  genesis.hash = block_hash(genesis);
  channels_.emplace(name, std::make_unique<Channel>(name, std::set<std::string, std::less<>>(member_orgs.begin(),
                                                                                             member_orgs.end()),
                                                    genesis, config_));
}

void Ledger::install_chaincode(const std::string& channel, const std::string& name,
                               std::shared_ptr<const chaincode::Contract> contract) {
  std::lock_guard lock(mu_);
  auto& ch = channel_locked(channel);
  if (ch.chaincodes.contains(name)) throw LedgerError(LedgerErrc::DuplicateChaincode, name);
  ch.chaincodes.emplace(name, std::move(contract));
}

Ledger::Channel& Ledger::channel_locked(const std::string& name) {
  auto it = channels_.find(name);
  if (it == channels_.end()) throw LedgerError(LedgerErrc::UnknownChannel, name);
  return *it->second;
}

const Ledger::Channel& Ledger::channel_locked(const std::string& name) const {
  auto it = channels_.find(name);
  if (it == channels_.end()) throw LedgerError(LedgerErrc::UnknownChannel, name);
  return *it->second;
}

namespace {

struct Execution {
  std::string payload;
  std::vector<ReadEntry> reads;
  std::vector<WriteEntry> writes;
};

Execution execute(const chaincode::Contract& contract, const StateView& view, const std::string& function,
                  const std::vector<std::string>& args) {
  chaincode::TxContext ctx(view);
  Execution ex;
  ex.payload = contract.invoke(ctx, function, args);
  ex.reads = ctx.read_set();
  ex.writes = ctx.write_set();
  return ex;
}

}  // namespace

std::string Ledger::submit(const Identity& creator, const std::string& channel, const std::string& chaincode,
                           const std::string& function, const std::vector<std::string>& args, Millis now) {
  std::lock_guard lock(mu_);
  if (!registry_.contains(creator)) {
    throw LedgerError(LedgerErrc::UnknownIdentity, creator.org_id + "/" + creator.member_id);
  }
  auto& ch = channel_locked(channel);
  if (!ch.members.contains(creator.org_id)) {
    throw LedgerError(LedgerErrc::NotChannelMember, creator.org_id + " on " + channel);
  }
  auto cc = ch.chaincodes.find(chaincode);
  if (cc == ch.chaincodes.end()) throw LedgerError(LedgerErrc::UnknownChaincode, chaincode);

  Execution ex = execute(*cc->second, ch.overlay, function, args);

  Transaction tx;
  if (config_.endorsement == Endorsement::AllOrgs) {
    // Every member org executes independently; results must agree.
    for (const auto& org : ch.members) {
      if (org != creator.org_id) {
        const Execution other = execute(*cc->second, ch.overlay, function, args);
        if (other.reads != ex.reads || other.writes != ex.writes || other.payload != ex.payload) {
          throw chaincode::ContractError(chaincode::ContractErrc::NonDeterministic,
                                         chaincode + "." + function + " endorsement mismatch from " + org);
        }
      }
      tx.endorsements.push_back(org);
    }
  } else {
    tx.endorsements.push_back(creator.org_id);
  }

  tx.nonce = next_nonce_++;
  tx.creator = creator;
  tx.channel = channel;
  tx.chaincode = chaincode;
  tx.function = function;
  tx.args = args;
  tx.submit_time = now;
  tx.read_set = std::move(ex.reads);
  tx.write_set = std::move(ex.writes);
  tx.tx_id = digest_hex(transaction_digest(tx));

  ch.overlay.apply(tx.write_set);
  std::string id = tx.tx_id;
  ch.orderer.enqueue(std::move(tx));
  for (auto& block : ch.orderer.cut(now)) ch.cut_pending.push_back(std::move(block));
  return id;
}

std::string Ledger::evaluate(const Identity& creator, const std::string& channel, const std::string& chaincode,
                             const std::string& function, const std::vector<std::string>& args) const {
  std::lock_guard lock(mu_);
  if (!registry_.contains(creator)) {
    throw LedgerError(LedgerErrc::UnknownIdentity, creator.org_id + "/" + creator.member_id);
  }
  const auto& ch = channel_locked(channel);
  if (!ch.members.contains(creator.org_id)) {
    throw LedgerError(LedgerErrc::NotChannelMember, creator.org_id + " on " + channel);
  }
  auto cc = ch.chaincodes.find(chaincode);
  if (cc == ch.chaincodes.end()) throw LedgerError(LedgerErrc::UnknownChaincode, chaincode);
  return execute(*cc->second, ch.state, function, args).payload;
}

std::vector<Block> Ledger::tick_orderer(Millis now) {
  std::lock_guard lock(mu_);
  std::vector<Block> out;
  for (auto& [_, ch] : channels_) {
    for (auto& block : ch->orderer.cut(now)) {
      out.push_back(block);
      ch->cut_pending.push_back(std::move(block));
    }
  }
  return out;
}

std::vector<CommitRecord> Ledger::commit_locked(Channel& ch, const Block& block, Millis now) {
  const Block& last = ch.committed.back();
  if (block.channel != ch.name) {
    throw LedgerError(LedgerErrc::BrokenChain, "block for channel " + block.channel + " committed on " + ch.name);
  }
  if (block.number != last.number + 1) {
    throw LedgerError(LedgerErrc::BrokenChain, "expected block " + std::to_string(last.number + 1) + ", got " +
                                                   std::to_string(block.number));
  }
  if (block.prev_hash != last.hash) {
    throw LedgerError(LedgerErrc::BrokenChain, "prev_hash mismatch at block " + std::to_string(block.number));
  }
  if (block.hash != block_hash(block)) {
    throw LedgerError(LedgerErrc::BrokenChain, "hash mismatch at block " + std::to_string(block.number));
  }
  if (block.txs.empty() || block.txs.size() > config_.batch_size) {
    throw LedgerError(LedgerErrc::BrokenChain, "block " + std::to_string(block.number) + " has " +
                                                   std::to_string(block.txs.size()) + " transactions");
  }

  const auto statuses = validate_and_apply(ch.state, block, ch.committed_ids);
  std::vector<CommitRecord> records;
  records.reserve(block.txs.size());
  for (std::size_t i = 0; i < block.txs.size(); ++i) {
    const auto& tx = block.txs[i];
    records.push_back(CommitRecord{tx.tx_id, tx.chaincode, tx.submit_time, now, now - tx.submit_time, statuses[i]});
  }
  ch.committed.push_back(block);
  if (!ch.cut_pending.empty() && ch.cut_pending.front().number == block.number) ch.cut_pending.pop_front();
  ch.rebuild_overlay();
  records_.insert(records_.end(), records.begin(), records.end());
  return records;
}

std::vector<CommitRecord> Ledger::commit_block(const std::string& channel, const Block& block, Millis now) {
  std::vector<CommitRecord> records;
  {
    std::lock_guard lock(mu_);
    records = commit_locked(channel_locked(channel), block, now);
  }
  notify(records);
  return records;
}

std::vector<CommitRecord> Ledger::advance(Millis now) {
  std::vector<CommitRecord> records;
  {
    std::lock_guard lock(mu_);
    for (auto& [_, ch] : channels_) {
      for (auto& block : ch->orderer.cut(now)) ch->cut_pending.push_back(std::move(block));
      while (!ch->cut_pending.empty()) {
        const Millis due = ch->cut_pending.front().cut_time + config_.validation_budget;
        if (due > now) break;
        const Block block = ch->cut_pending.front();
        auto committed = commit_locked(*ch, block, due);
        records.insert(records.end(), committed.begin(), committed.end());
      }
    }
  }
  notify(records);
  return records;
}

void Ledger::notify(const std::vector<CommitRecord>& records) const {
  std::vector<CommitListener> listeners;
  {
    std::lock_guard lock(mu_);
    listeners = listeners_;
  }
  for (const auto& record : records) {
    for (const auto& listener : listeners) listener(record);
  }
}

std::optional<VersionedValue> Ledger::query_state(const std::string& channel, const std::string& key) const {
  std::lock_guard lock(mu_);
  return channel_locked(channel).state.get(key);
}

void Ledger::subscribe(CommitListener listener) {
  std::lock_guard lock(mu_);
  listeners_.push_back(std::move(listener));
}

std::vector<Block> Ledger::blocks(const std::string& channel) const {
  std::lock_guard lock(mu_);
  return channel_locked(channel).committed;
}

std::vector<Block> Ledger::all_blocks() const {
  std::lock_guard lock(mu_);
  std::vector<Block> out;
  for (const auto& [_, ch] : channels_) out.insert(out.end(), ch->committed.begin(), ch->committed.end());
  return out;
}

std::vector<CommitRecord> Ledger::commit_records() const {
  std::lock_guard lock(mu_);
  return records_;
}

ChannelStates Ledger::world_states() const {
  std::lock_guard lock(mu_);
  ChannelStates out;
  for (const auto& [name, ch] : channels_) out.emplace(name, ch->state);
  return out;
}

std::size_t Ledger::queue_length(const std::string& channel) const {
  std::lock_guard lock(mu_);
  return channel_locked(channel).orderer.queue_length();
}

std::size_t Ledger::max_queue_length(const std::string& channel) const {
  std::lock_guard lock(mu_);
  return channel_locked(channel).orderer.max_queue_length();
}

std::size_t Ledger::pending_count() const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& [_, ch] : channels_) {
    n += ch->orderer.queue_length();
    for (const auto& b : ch->cut_pending) n += b.txs.size();
  }
  return n;
}

std::uint64_t Ledger::submitted_count() const {
  std::lock_guard lock(mu_);
  return next_nonce_;
}

}  // namespace chainfleet::ledger
