#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chainfleet/chaincode/context.hpp"

namespace chainfleet::chaincode {

/// Structured asset value. Objects keep keys sorted, so dump() is canonical.
using Document = nlohmann::json;

struct Asset {
  std::string key;
  Document value;
  std::uint64_t version = 0;
};

std::string canonical(const Document& doc);
// Throws ContractError(InvalidArgument) on malformed JSON.
Document parse_document(std::string_view text);

// Generic CRUD shared by every contract.
void create_asset(TxContext& ctx, const std::string& key, const Document& value);   // AlreadyExists
Document read_asset(TxContext& ctx, const std::string& key);                        // NotFound
void update_asset(TxContext& ctx, const std::string& key, const Document& value);   // NotFound
std::vector<Asset> query_all(TxContext& ctx, std::string_view prefix);

}  // namespace chainfleet::chaincode
