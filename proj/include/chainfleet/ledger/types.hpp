#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "chainfleet/common/bytes.hpp"
#include "chainfleet/common/digest.hpp"
#include "chainfleet/common/time.hpp"
#include "chainfleet/ledger/state.hpp"

namespace chainfleet::ledger {

enum class Role : std::uint8_t { Robot, Operator, Peer, Orderer };

const char* to_string(Role role);

struct Identity {
  std::string org_id;
  std::string member_id;
  Role role = Role::Robot;

  friend bool operator==(const Identity&, const Identity&) = default;
};

enum class Endorsement : std::uint8_t { AnyOrg, AllOrgs };

struct Transaction {
  std::string tx_id;  // hex digest of every other field
  std::uint64_t nonce = 0;
  Identity creator;
  std::string channel;
  std::string chaincode;
  std::string function;
  std::vector<std::string> args;
  Millis submit_time{0};
  std::vector<std::string> endorsements;  // endorsing org ids
  std::vector<ReadEntry> read_set;
  std::vector<WriteEntry> write_set;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct Block {
  std::string channel;
  std::uint64_t number = 0;
  Digest prev_hash = kZeroDigest;
  Millis cut_time{0};
  std::vector<Transaction> txs;
  Digest hash = kZeroDigest;

  friend bool operator==(const Block&, const Block&) = default;
};

enum class TxStatus : std::uint8_t { Valid, Invalidated };

const char* to_string(TxStatus status);

struct CommitRecord {
  std::string tx_id;
  std::string chaincode;
  Millis submit_time{0};
  Millis commit_time{0};
  Millis latency{0};
  TxStatus status = TxStatus::Valid;

  friend bool operator==(const CommitRecord&, const CommitRecord&) = default;
};

struct LedgerConfig {
  std::size_t batch_size = 10;
  Millis batch_timeout{1000};
  // Peer-side processing time charged between cutting and committing a block.
  Millis validation_budget{1};
  std::vector<std::string> channels;
  Endorsement endorsement = Endorsement::AnyOrg;

  // Throws LedgerError(InvalidConfig).
  void validate() const;
};

// Canonical encoding: big-endian fixed-width integers, u32 length-prefixed strings and lists.
void encode(ByteWriter& out, const Transaction& tx);
Transaction decode_transaction(ByteReader& in);

/// Digest of all transaction fields except tx_id; tx_id is its hex form.
Digest transaction_digest(const Transaction& tx);

/// Digest over (channel, number, prev_hash, cut_time, ordered tx_ids).
Digest block_hash(const Block& block);

Bytes serialize_block(const Block& block);
// Throws DecodeError on malformed or trailing bytes. Does not verify hashes.
Block deserialize_block(std::span<const std::uint8_t> bytes);

}  // namespace chainfleet::ledger
