#include "chainfleet/ledger/block_log.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "chainfleet/ledger/validation.hpp"

namespace chainfleet::ledger {

std::string to_log_line(const Block& block) { return to_hex(serialize_block(block)); }

Block from_log_line(std::string_view line) { return deserialize_block(from_hex(line)); }

void write_block_log(std::ostream& out, std::span<const Block> blocks) {
  for (const auto& block : blocks) out << to_log_line(block) << '\n';
}

std::vector<std::string> read_log_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

ReplayResult replay(std::span<const Block> blocks) {
  ReplayResult result;
  std::map<std::string, std::set<std::string>, std::less<>> committed_ids;
  for (const auto& block : blocks) {
    auto& state = result.states[block.channel];
    result.statuses.push_back(validate_and_apply(state, block, committed_ids[block.channel]));
  }
  return result;
}

}  // namespace chainfleet::ledger
