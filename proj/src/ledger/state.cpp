#include "chainfleet/ledger/state.hpp"

namespace chainfleet::ledger {

std::optional<VersionedValue> WorldState::get(std::string_view key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::string, VersionedValue>> WorldState::scan(std::string_view prefix) const {
  std::vector<std::pair<std::string, VersionedValue>> out;
  for (auto it = entries_.lower_bound(prefix); it != entries_.end(); ++it) {
    if (!std::string_view(it->first).starts_with(prefix)) break;
    out.emplace_back(it->first, it->second);
  }
  return out;
}

std::uint64_t WorldState::version(std::string_view key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second.version;
}

void WorldState::apply(const WriteEntry& write) {
  auto it = entries_.find(write.key);
  if (it == entries_.end()) {
    entries_.emplace(write.key, VersionedValue{write.value, 1});
  } else {
    it->second.value = write.value;
    ++it->second.version;
  }
}

void WorldState::encode(ByteWriter& out) const {
  out.u64(entries_.size());
  for (const auto& [key, vv] : entries_) {
    out.str(key);
    out.str(vv.value);
    out.u64(vv.version);
  }
}

Bytes serialize_states(const ChannelStates& states) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(states.size()));
  for (const auto& [channel, state] : states) {
    w.str(channel);
    state.encode(w);
  }
  return std::move(w).take();
}

}  // namespace chainfleet::ledger
