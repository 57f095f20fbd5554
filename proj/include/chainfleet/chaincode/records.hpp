#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "chainfleet/chaincode/asset.hpp"

namespace chainfleet::chaincode {

// Key layout on the shared channel.
inline constexpr std::string_view kPathPrefix = "path/";
inline constexpr std::string_view kPathMetaPrefix = "pathmeta/";
inline constexpr std::string_view kObjectPrefix = "object/";
inline constexpr std::string_view kBatteryPrefix = "battery/";
inline constexpr std::string_view kDockingOrderKey = "docking/order";

std::string path_key(std::string_view robot_id, std::uint64_t seq);
std::string path_prefix(std::string_view robot_id);
std::string path_meta_key(std::string_view robot_id);
std::string object_key(std::string_view object_id);
std::string battery_key(std::string_view robot_id);

using Point3 = std::array<double, 3>;

struct PoseRecord {
  std::string robot_id;
  std::int64_t t = 0;  // ms
  double x = 0, y = 0, z = 0;
};

struct ObjectRecord {
  std::string object_id;
  std::string category;
  double x = 0, y = 0, z = 0;
  std::string detector;  // last detector
  std::int64_t t = 0;    // last sighting
  std::uint32_t sightings = 1;
};

struct BatteryAsset {
  std::string robot_id;
  double level = 0;
  std::int64_t t = 0;
};

enum class DockingStatus : std::uint8_t { None, Ordered, Accepted, Docking, Docked };

const char* to_string(DockingStatus s);
std::optional<DockingStatus> parse_docking_status(std::string_view s);

struct DockingOrder {
  DockingStatus status = DockingStatus::None;
  Point3 rendezvous{};
  std::int64_t issued_at = 0;
};

void to_json(Document& j, const PoseRecord& r);
void from_json(const Document& j, PoseRecord& r);
void to_json(Document& j, const ObjectRecord& r);
void from_json(const Document& j, ObjectRecord& r);
void to_json(Document& j, const BatteryAsset& r);
void from_json(const Document& j, BatteryAsset& r);
void to_json(Document& j, const DockingOrder& r);
void from_json(const Document& j, DockingOrder& r);

}  // namespace chainfleet::chaincode
