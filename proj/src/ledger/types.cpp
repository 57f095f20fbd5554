#include "chainfleet/ledger/types.hpp"

#include "chainfleet/ledger/errors.hpp"

namespace chainfleet::ledger {

const char* to_string(LedgerErrc code) {
  switch (code) {
    case LedgerErrc::DuplicateIdentity: return "DuplicateIdentity";
    case LedgerErrc::UnknownIdentity: return "UnknownIdentity";
    case LedgerErrc::DuplicateChannel: return "DuplicateChannel";
    case LedgerErrc::UnknownChannel: return "UnknownChannel";
    case LedgerErrc::UnknownOrg: return "UnknownOrg";
    case LedgerErrc::NotChannelMember: return "NotChannelMember";
    case LedgerErrc::UnknownChaincode: return "UnknownChaincode";
    case LedgerErrc::DuplicateChaincode: return "DuplicateChaincode";
    case LedgerErrc::BrokenChain: return "BrokenChain";
    case LedgerErrc::InvalidConfig: return "InvalidConfig";
  }
  return "LedgerError";
}

const char* to_string(Role role) {
  switch (role) {
    case Role::Robot: return "robot";
    case Role::Operator: return "operator";
    case Role::Peer: return "peer";
    case Role::Orderer: return "orderer";
  }
  return "unknown";
}

const char* to_string(TxStatus status) { return status == TxStatus::Valid ? "valid" : "invalidated"; }

void LedgerConfig::validate() const {
  if (batch_size < 1) throw LedgerError(LedgerErrc::InvalidConfig, "batch_size must be >= 1");
  if (batch_timeout <= Millis{0}) throw LedgerError(LedgerErrc::InvalidConfig, "batch_timeout must be > 0");
  if (validation_budget < Millis{0}) throw LedgerError(LedgerErrc::InvalidConfig, "validation_budget must be >= 0");
}

namespace {

void encode_identity(ByteWriter& out, const Identity& id) {
  out.str(id.org_id);
  out.str(id.member_id);
  out.u8(static_cast<std::uint8_t>(id.role));
}

Identity decode_identity(ByteReader& in) {
  Identity id;
  id.org_id = in.str();
  id.member_id = in.str();
  const auto role = in.u8();
  if (role > static_cast<std::uint8_t>(Role::Orderer)) throw DecodeError("invalid role");
  id.role = static_cast<Role>(role);
  return id;
}

void encode_body(ByteWriter& out, const Transaction& tx) {
  out.u64(tx.nonce);
  encode_identity(out, tx.creator);
  out.str(tx.channel);
  out.str(tx.chaincode);
  out.str(tx.function);
  out.u32(static_cast<std::uint32_t>(tx.args.size()));
  for (const auto& a : tx.args) out.str(a);
  out.i64(tx.submit_time.count());
  out.u32(static_cast<std::uint32_t>(tx.endorsements.size()));
  for (const auto& e : tx.endorsements) out.str(e);
  out.u32(static_cast<std::uint32_t>(tx.read_set.size()));
  for (const auto& r : tx.read_set) {
    out.str(r.key);
    out.u64(r.version);
  }
  out.u32(static_cast<std::uint32_t>(tx.write_set.size()));
  for (const auto& w : tx.write_set) {
    out.str(w.key);
    out.str(w.value);
  }
}

// Guards list allocation against corrupted length prefixes.
std::uint32_t list_length(ByteReader& in) {
  const auto n = in.u32();
  if (n > in.remaining()) throw DecodeError("list length exceeds input");
  return n;
}

}  // namespace

void encode(ByteWriter& out, const Transaction& tx) {
  out.str(tx.tx_id);
  encode_body(out, tx);
}

Transaction decode_transaction(ByteReader& in) {
  Transaction tx;
  tx.tx_id = in.str();
  tx.nonce = in.u64();
  tx.creator = decode_identity(in);
  tx.channel = in.str();
  tx.chaincode = in.str();
  tx.function = in.str();
  const auto nargs = list_length(in);
  tx.args.reserve(nargs);
  for (std::uint32_t i = 0; i < nargs; ++i) tx.args.push_back(in.str());
  tx.submit_time = Millis{in.i64()};
  const auto nend = list_length(in);
  for (std::uint32_t i = 0; i < nend; ++i) tx.endorsements.push_back(in.str());
  const auto nreads = list_length(in);
  tx.read_set.reserve(nreads);
  for (std::uint32_t i = 0; i < nreads; ++i) {
    ReadEntry r;
    r.key = in.str();
    r.version = in.u64();
    tx.read_set.push_back(std::move(r));
  }
  const auto nwrites = list_length(in);
  tx.write_set.reserve(nwrites);
  for (std::uint32_t i = 0; i < nwrites; ++i) {
    WriteEntry w;
    w.key = in.str();
    w.value = in.str();
    tx.write_set.push_back(std::move(w));
  }
  return tx;
}

Digest transaction_digest(const Transaction& tx) {
  ByteWriter w;
  encode_body(w, tx);
  return sha256(w.bytes());
}

Digest block_hash(const Block& block) {
  ByteWriter w;
  w.str(block.channel);
  w.u64(block.number);
  w.raw(block.prev_hash);
  w.i64(block.cut_time.count());
  w.u32(static_cast<std::uint32_t>(block.txs.size()));
  for (const auto& tx : block.txs) w.str(tx.tx_id);
  return sha256(w.bytes());
}

Bytes serialize_block(const Block& block) {
  ByteWriter w;
  w.str(block.channel);
  w.u64(block.number);
  w.raw(block.prev_hash);
  w.i64(block.cut_time.count());
  w.u32(static_cast<std::uint32_t>(block.txs.size()));
  for (const auto& tx : block.txs) encode(w, tx);
  w.raw(block.hash);
  return std::move(w).take();
}

Block deserialize_block(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  Block b;
  b.channel = in.str();
  b.number = in.u64();
  in.raw(b.prev_hash);
  b.cut_time = Millis{in.i64()};
  const auto ntx = list_length(in);
  b.txs.reserve(ntx);
  for (std::uint32_t i = 0; i < ntx; ++i) b.txs.push_back(decode_transaction(in));
  in.raw(b.hash);
  if (!in.done()) throw DecodeError("trailing bytes after block");
  return b;
}

}  // namespace chainfleet::ledger
