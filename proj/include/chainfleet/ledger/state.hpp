#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chainfleet/common/bytes.hpp"

namespace chainfleet::ledger {

/// Value plus the number of committed writes to its key. Absent keys read as version 0.
struct VersionedValue {
  std::string value;
  std::uint64_t version = 0;

  friend bool operator==(const VersionedValue&, const VersionedValue&) = default;
};

struct ReadEntry {
  std::string key;
  std::uint64_t version = 0;

  friend bool operator==(const ReadEntry&, const ReadEntry&) = default;
};

struct WriteEntry {
  std::string key;
  std::string value;

  friend bool operator==(const WriteEntry&, const WriteEntry&) = default;
};

/// Read-only key-value view that contracts execute against.
class StateView {
 public:
  virtual ~StateView() = default;
  virtual std::optional<VersionedValue> get(std::string_view key) const = 0;
  // Entries whose key starts with prefix, in key order.
  virtual std::vector<std::pair<std::string, VersionedValue>> scan(std::string_view prefix) const = 0;
};

/// Versioned key-value map for one channel.
class WorldState final : public StateView {
 public:
  std::optional<VersionedValue> get(std::string_view key) const override;
  std::vector<std::pair<std::string, VersionedValue>> scan(std::string_view prefix) const override;

  std::uint64_t version(std::string_view key) const;
  // Stores value and bumps the key's version by one.
  void apply(const WriteEntry& write);

  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, VersionedValue, std::less<>>& entries() const { return entries_; }

  void encode(ByteWriter& out) const;

  friend bool operator==(const WorldState&, const WorldState&) = default;

 private:
  std::map<std::string, VersionedValue, std::less<>> entries_;
};

using ChannelStates = std::map<std::string, WorldState, std::less<>>;

/// Canonical bytes for a set of channel states (sorted by channel, then key).
Bytes serialize_states(const ChannelStates& states);

}  // namespace chainfleet::ledger
