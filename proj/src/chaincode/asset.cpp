#include "chainfleet/chaincode/asset.hpp"

#include "chainfleet/chaincode/errors.hpp"

namespace chainfleet::chaincode {

const char* to_string(ContractErrc code) {
  switch (code) {
    case ContractErrc::AlreadyExists: return "AlreadyExists";
    case ContractErrc::NotFound: return "NotFound";
    case ContractErrc::TimestampRegression: return "TimestampRegression";
    case ContractErrc::OutOfRange: return "OutOfRange";
    case ContractErrc::InvalidTransition: return "InvalidTransition";
    case ContractErrc::InvalidArgument: return "InvalidArgument";
    case ContractErrc::UnknownFunction: return "UnknownFunction";
    case ContractErrc::NonDeterministic: return "NonDeterministic";
  }
  return "ContractError";
}

std::string canonical(const Document& doc) { return doc.dump(); }

Document parse_document(std::string_view text) {
  try {
    return Document::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ContractError(ContractErrc::InvalidArgument, std::string("malformed document: ") + e.what());
  }
}

namespace {
void require_key(const std::string& key) {
  if (key.empty()) throw ContractError(ContractErrc::InvalidArgument, "empty asset key");
}
}  // namespace

void create_asset(TxContext& ctx, const std::string& key, const Document& value) {
  require_key(key);
  if (ctx.get_state(key)) throw ContractError(ContractErrc::AlreadyExists, key);
  ctx.put_state(key, canonical(value));
}

Document read_asset(TxContext& ctx, const std::string& key) {
  require_key(key);
  auto raw = ctx.get_state(key);
  if (!raw) throw ContractError(ContractErrc::NotFound, key);
  return Document::parse(*raw);
}

void update_asset(TxContext& ctx, const std::string& key, const Document& value) {
  require_key(key);
  if (!ctx.get_state(key)) throw ContractError(ContractErrc::NotFound, key);
  ctx.put_state(key, canonical(value));
}

std::vector<Asset> query_all(TxContext& ctx, std::string_view prefix) {
  std::vector<Asset> out;
  for (auto& [key, raw] : ctx.scan(prefix)) {
    const auto version = ctx.snapshot_version(key);
    out.push_back(Asset{key, Document::parse(raw), version});
  }
  return out;
}

}  // namespace chainfleet::chaincode
