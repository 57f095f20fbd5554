#include "chainfleet/chaincode/context.hpp"

namespace chainfleet::chaincode {

std::optional<std::string> TxContext::get_state(const std::string& key) {
  if (auto w = writes_.find(key); w != writes_.end()) return w->second;
  auto vv = snapshot_.get(key);
  reads_.try_emplace(key, vv ? vv->version : 0);
  if (!vv) return std::nullopt;
  return std::move(vv->value);
}

void TxContext::put_state(const std::string& key, std::string value) { writes_[key] = std::move(value); }

std::vector<std::pair<std::string, std::string>> TxContext::scan(std::string_view prefix) {
  std::map<std::string, std::string, std::less<>> merged;
  for (auto& [key, vv] : snapshot_.scan(prefix)) {
    reads_.try_emplace(key, vv.version);
    merged.emplace(key, std::move(vv.value));
  }
  for (auto it = writes_.lower_bound(prefix); it != writes_.end() && std::string_view(it->first).starts_with(prefix);
       ++it) {
    merged[it->first] = it->second;
  }
  return {merged.begin(), merged.end()};
}

std::uint64_t TxContext::snapshot_version(std::string_view key) const {
  auto vv = snapshot_.get(key);
  return vv ? vv->version : 0;
}

std::vector<ledger::ReadEntry> TxContext::read_set() const {
  std::vector<ledger::ReadEntry> out;
  out.reserve(reads_.size());
  for (const auto& [key, version] : reads_) out.push_back({key, version});
  return out;
}

std::vector<ledger::WriteEntry> TxContext::write_set() const {
  std::vector<ledger::WriteEntry> out;
  out.reserve(writes_.size());
  for (const auto& [key, value] : writes_) out.push_back({key, value});
  return out;
}

}  // namespace chainfleet::chaincode
