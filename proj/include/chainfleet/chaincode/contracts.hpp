#pragma once

#include <set>
#include <string>
#include <vector>

#include "chainfleet/chaincode/contract.hpp"
#include "chainfleet/chaincode/records.hpp"

namespace chainfleet::chaincode {

/// Generic asset application, restricted to a set of key namespaces.
///
/// Functions:
///   CreateAsset(key, json)   UpdateAsset(key, json)   ReadAsset(key) -> json
///   QueryAll(prefix) -> [{"key","value","version"}...]
class AssetContract : public Contract {
 public:
  explicit AssetContract(std::vector<std::string> namespaces) : namespaces_(std::move(namespaces)) {}

  std::string invoke(TxContext& ctx, std::string_view function, std::span<const std::string> args) const override;

 protected:
  void require_namespace(const std::string& key) const;

 private:
  std::vector<std::string> namespaces_;
};

/// Append-only pose log for one robot.
///
///   RecordPath(t_ms, x, y, z) -> key
///
/// Keys are path/<robot>/<seq> with an 8-digit zero-padded seq starting at 0.
/// A cursor at pathmeta/<robot> holds {"next_seq", "last_t"}.
class PathRecorder final : public AssetContract {
 public:
  explicit PathRecorder(std::string robot_id);

  std::string invoke(TxContext& ctx, std::string_view function, std::span<const std::string> args) const override;

  std::string record_path(TxContext& ctx, const PoseRecord& pose) const;

 private:
  std::string robot_id_;
};

/// Object inventory writer for one detecting robot. Both detectors share the
/// object/ namespace, so a placement seen by either robot is one row.
///
///   RecordObject(object_id, category, x, y, z, t_ms)
class ObjectRecorder final : public AssetContract {
 public:
  ObjectRecorder(std::string detector_id, std::set<std::string> categories);

  std::string invoke(TxContext& ctx, std::string_view function, std::span<const std::string> args) const override;

  // Upsert keyed object/<object_id>; repeated sightings average the position.
  void record_object(TxContext& ctx, const ObjectRecord& record) const;

 private:
  std::string detector_id_;
  std::set<std::string> categories_;
};

struct BatteryPolicy {
  double threshold = 0.30;  // docking is ordered when level < threshold
  Point3 rendezvous{};
};

/// Battery level recorder and docking state machine.
///
///   UpdateBattery(robot_id, level[, t_ms])
///   AdvanceDocking(status[, t_ms])      none -> ordered -> accepted -> docking -> docked
///   ReadDockingOrder() -> json          {"status":"none"} before any order
class BatteryContract final : public AssetContract {
 public:
  explicit BatteryContract(BatteryPolicy policy);

  std::string invoke(TxContext& ctx, std::string_view function, std::span<const std::string> args) const override;

  void update_battery(TxContext& ctx, const BatteryAsset& battery) const;
  void advance_docking(TxContext& ctx, DockingStatus next, std::int64_t t) const;
  DockingOrder docking_order(TxContext& ctx) const;

 private:
  BatteryPolicy policy_;
};

/// The default COCO category names an ObjectRecorder accepts.
std::set<std::string> coco_categories();

}  // namespace chainfleet::chaincode
