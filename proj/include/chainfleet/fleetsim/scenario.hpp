#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainfleet/common/time.hpp"
#include "chainfleet/ledger/types.hpp"
#include "chainfleet/localization/localization.hpp"

namespace chainfleet::fleetsim {

using localization::Vec3;

enum class RobotKind { Ugv, Uav };

const char* to_string(RobotKind kind);

struct RobotSpec {
  std::string id;
  RobotKind kind = RobotKind::Ugv;
  std::string org;
  Vec3 start = Vec3::Zero();
  double v_max = 0.5;  // m/s
  std::vector<Vec3> waypoints;
};

struct PlacedObject {
  std::string category;
  Vec3 position = Vec3::Zero();
};

struct DetectionParams {
  double range_m = 2.0;
  double fov_rad = 1.2217304763960306;  // 70 deg
  double noise_sigma = 0.05;            // m per axis
  Millis cooldown{2000};
};

struct Rates {
  double path_hz = 50;
  double battery_hz = 10;
  double detect_forward_hz = 5;
};

struct BatteryParams {
  double initial = 0.6;
  double drain_per_s = 0.004;
  double threshold = 0.30;
  double charge_per_s = 0.01;
};

struct DockingParams {
  double r_rdv = 0.5;            // horizontal arrival radius around the rendezvous
  double d_dock = 0.15;          // horizontal landing radius around the deck centre
  double deck_height = 0.1;      // deck surface above the UGV base
  double land_clearance = 0.1;   // landing allowed this far above the deck
  double approach_height = 0.8;  // UAV hover height over the rendezvous
  double descent_speed = 0.25;   // m/s
};

struct AnchorSpec {
  std::string id;
  Vec3 position = Vec3::Zero();  // world frame for global, body frame for mounted
};

struct UwbParams {
  double sigma = 0.05;
  double filter_alpha = 0.2;  // exponential smoothing of position fixes
  std::vector<AnchorSpec> global_anchors;
  std::vector<AnchorSpec> mounted_anchors;
};

struct Room {
  double width = 8, depth = 5, height = 3;

  bool contains(const Vec3& p) const {
    return p.x() >= 0 && p.x() <= width && p.y() >= 0 && p.y() <= depth && p.z() >= 0 && p.z() <= height;
  }
};

struct Scenario {
  std::uint64_t seed = 7;
  Millis dt{10};
  Millis duration{200000};
  Room room;
  std::vector<RobotSpec> robots;
  std::vector<PlacedObject> objects;
  DetectionParams detection;
  Rates rates;
  BatteryParams battery;
  Vec3 rendezvous = Vec3(4.0, 2.5, 0.0);
  DockingParams docking;
  ledger::LedgerConfig ledger;
  std::string channel = "inventory";
  UwbParams uwb;

  const RobotSpec& ugv() const;
  const RobotSpec& uav() const;
};

/// Rejected scenario; `field()` is the dotted path of the offending value.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, const std::string& message)
      : std::runtime_error("invalid scenario field `" + field + "`: " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Two-robot inventory mission in an 8 x 5 x 3 m room with twelve objects.
Scenario default_scenario();

// Fields absent from the text keep their default_scenario() value.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);
std::string scenario_to_json(const Scenario& scenario);

// Throws ScenarioError.
void validate(const Scenario& scenario);

}  // namespace chainfleet::fleetsim
