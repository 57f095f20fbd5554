#include "chainfleet/chaincode/records.hpp"

#include <cstdio>

namespace chainfleet::chaincode {

std::string path_key(std::string_view robot_id, std::uint64_t seq) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%08llu", static_cast<unsigned long long>(seq));
  return path_prefix(robot_id) + buf;
}

std::string path_prefix(std::string_view robot_id) {
  return std::string(kPathPrefix) + std::string(robot_id) + "/";
}

std::string path_meta_key(std::string_view robot_id) { return std::string(kPathMetaPrefix) + std::string(robot_id); }

std::string object_key(std::string_view object_id) { return std::string(kObjectPrefix) + std::string(object_id); }

std::string battery_key(std::string_view robot_id) { return std::string(kBatteryPrefix) + std::string(robot_id); }

const char* to_string(DockingStatus s) {
  switch (s) {
    case DockingStatus::None: return "none";
    case DockingStatus::Ordered: return "ordered";
    case DockingStatus::Accepted: return "accepted";
    case DockingStatus::Docking: return "docking";
    case DockingStatus::Docked: return "docked";
  }
  return "none";
}

std::optional<DockingStatus> parse_docking_status(std::string_view s) {
  for (auto status : {DockingStatus::None, DockingStatus::Ordered, DockingStatus::Accepted, DockingStatus::Docking,
                      DockingStatus::Docked}) {
    if (s == to_string(status)) return status;
  }
  return std::nullopt;
}

void to_json(Document& j, const PoseRecord& r) {
  j = Document{{"robot_id", r.robot_id}, {"t", r.t}, {"x", r.x}, {"y", r.y}, {"z", r.z}};
}

void from_json(const Document& j, PoseRecord& r) {
  j.at("robot_id").get_to(r.robot_id);
  j.at("t").get_to(r.t);
  j.at("x").get_to(r.x);
  j.at("y").get_to(r.y);
  j.at("z").get_to(r.z);
}

void to_json(Document& j, const ObjectRecord& r) {
  j = Document{{"object_id", r.object_id}, {"category", r.category}, {"x", r.x},  {"y", r.y},
               {"z", r.z},                 {"detector", r.detector}, {"t", r.t}, {"sightings", r.sightings}};
}

void from_json(const Document& j, ObjectRecord& r) {
  j.at("object_id").get_to(r.object_id);
  j.at("category").get_to(r.category);
  j.at("x").get_to(r.x);
  j.at("y").get_to(r.y);
  j.at("z").get_to(r.z);
  j.at("detector").get_to(r.detector);
  j.at("t").get_to(r.t);
  r.sightings = j.value("sightings", 1u);
}

void to_json(Document& j, const BatteryAsset& r) {
  j = Document{{"robot_id", r.robot_id}, {"level", r.level}, {"t", r.t}};
}

void from_json(const Document& j, BatteryAsset& r) {
  j.at("robot_id").get_to(r.robot_id);
  j.at("level").get_to(r.level);
  j.at("t").get_to(r.t);
}

void to_json(Document& j, const DockingOrder& r) {
  j = Document{{"status", to_string(r.status)}, {"rendezvous", r.rendezvous}, {"issued_at", r.issued_at}};
}

void from_json(const Document& j, DockingOrder& r) {
  const auto status = parse_docking_status(j.at("status").get<std::string>());
  if (!status) throw nlohmann::json::other_error::create(501, "unknown docking status", &j);
  r.status = *status;
  j.at("rendezvous").get_to(r.rendezvous);
  j.at("issued_at").get_to(r.issued_at);
}

}  // namespace chainfleet::chaincode
