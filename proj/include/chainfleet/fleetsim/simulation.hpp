#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chainfleet/chaincode/records.hpp"
#include "chainfleet/common/random.hpp"
#include "chainfleet/fleetsim/scenario.hpp"
#include "chainfleet/ledger/ledger.hpp"
#include "chainfleet/localization/localization.hpp"

namespace chainfleet::fleetsim {

using localization::LocalizationMode;
using localization::PositionEstimate;

enum class MissionMode { Inspect, ToRendezvous, AwaitDock, Docking, Docked };

const char* to_string(MissionMode mode);

struct RobotState {
  std::string robot_id;
  RobotKind kind = RobotKind::Ugv;
  Vec3 true_pose = Vec3::Zero();
  PositionEstimate est_pose;  // filtered, world frame
  double heading = 0;         // rad
  double battery = 1.0;
  MissionMode mode = MissionMode::Inspect;
  LocalizationMode loc_mode = LocalizationMode::Global;
  std::size_t next_waypoint = 0;
};

struct DetectionEvent {
  Millis t{0};
  std::string detector;
  std::string category;
  Vec3 estimated_object_position = Vec3::Zero();
  std::string object_id;
};

/// Inventory id from category and the 0.5 m cell holding the position, e.g. "potted-plant_4_1_1".
std::string cell_object_id(const std::string& category, const Vec3& position);

/// Geometric stand-in for the on-board object detector.
///
/// An object is seen when it lies within range_m of the robot and within
/// fov_rad/2 of its heading in the horizontal plane. Each object is reported
/// at most once per cooldown per detector. Noise is drawn only for emitted
/// events, three draws per event in x, y, z order.
class Detector {
 public:
  explicit Detector(DetectionParams params) : params_(params) {}

  std::vector<DetectionEvent> detect(const RobotState& robot, std::span<const PlacedObject> objects,
                                     NormalSampler& rng, Millis now);

 private:
  DetectionParams params_;
  std::map<std::size_t, Millis> last_seen_;
};

struct SimEvent {
  Millis t{0};
  std::string robot_id;
  std::string event;
  std::string detail;
};

struct TrajectorySample {
  Millis t{0};
  std::string robot_id;
  Vec3 truth = Vec3::Zero();
  Vec3 est = Vec3::Zero();
};

struct LocalizationSample {
  Millis t{0};
  std::string robot_id;
  Vec3 position = Vec3::Zero();
  double residual_rms = 0;
  LocalizationMode mode = LocalizationMode::Global;
  int global_anchors = 0;   // enabled for this tag at this tick
  int mounted_anchors = 0;
};

/// Discrete-time two-robot mission over a private ledger.
///
/// Each tick: commit due blocks, react to the committed docking order, move,
/// localize, detect, and submit scheduled records. Robots only act on
/// committed chain state; the UAV switches to relative localization after the
/// block holding AdvanceDocking(docking) commits.
class Simulation {
 public:
  explicit Simulation(Scenario scenario);
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // Processes the tick at now() and advances the clock by dt.
  void step();
  bool done() const { return now_ > scenario_.duration; }
  // Steps to the end of the scenario, then commits every pending transaction.
  void run();
  void flush();

  Millis now() const { return now_; }
  const Scenario& scenario() const { return scenario_; }
  ledger::Ledger& ledger() { return *ledger_; }
  const ledger::Ledger& ledger() const { return *ledger_; }
  const localization::AnchorTable& anchors() const { return *anchors_; }

  const RobotState& ugv() const { return ugv_; }
  const RobotState& uav() const { return uav_; }

  const std::vector<SimEvent>& events() const { return events_; }
  const std::vector<TrajectorySample>& trajectory() const { return trajectory_; }
  const std::vector<LocalizationSample>& localization_log() const { return localization_log_; }
  const std::vector<DetectionEvent>& detections() const { return detections_; }

  chaincode::DockingStatus docking_status() const { return docking_status_; }
  std::optional<Millis> mode_switch_time() const { return mode_switch_time_; }
  // tx_id of each AdvanceDocking submission, keyed by target status.
  const std::map<chaincode::DockingStatus, std::string>& docking_submissions() const { return docking_txs_; }
  std::uint64_t rejected_submissions() const { return rejected_; }

  // Distance from the UAV to the UGV deck centre, true poses.
  double uav_deck_distance() const;

 private:
  struct Schedule {
    double hz = 0;
    std::uint64_t issued = 0;
    // Number of instants k * 1000 / hz ms due at or before now.
    std::uint64_t due(Millis now) const;
  };

  void react_to_chain();
  void set_mode(RobotState& robot, MissionMode mode);
  void move(RobotState& robot);
  void move_uav_docking();
  void drain_battery();
  void localize(RobotState& robot);
  void check_landing();
  void run_detection(RobotState& robot, Detector& detector, NormalSampler& rng, Schedule& schedule);
  void submit_scheduled();
  void record_samples();

  std::optional<std::string> submit(const RobotState& robot, const std::string& chaincode,
                                    const std::string& function, const std::vector<std::string>& args);
  void log(const std::string& robot_id, const std::string& event, const std::string& detail);
  const ledger::Identity& identity(const RobotState& robot) const;
  Vec3 deck_center() const;
  localization::CarrierPose ugv_estimated_pose() const;

  Scenario scenario_;
  Millis now_{0};
  std::unique_ptr<ledger::Ledger> ledger_;
  std::unique_ptr<localization::AnchorTable> anchors_;
  std::map<std::string, ledger::Identity> identities_;

  RobotState ugv_;
  RobotState uav_;
  Vec3 uav_relative_ = Vec3::Zero();   // filtered fix in the UGV body frame
  std::optional<Vec3> uav_raw_relative_;
  std::map<std::string, Vec3> raw_fix_;  // last unfiltered world fix per robot, warm start
  bool landed_ = false;

  Detector ugv_detector_;
  Detector uav_detector_;
  NormalSampler ugv_ranging_;
  NormalSampler uav_ranging_;
  NormalSampler ugv_detect_rng_;
  NormalSampler uav_detect_rng_;
  Schedule ugv_path_, uav_path_, battery_, ugv_detect_, uav_detect_;

  chaincode::DockingStatus docking_status_ = chaincode::DockingStatus::None;
  std::uint64_t docking_version_ = 0;
  std::map<chaincode::DockingStatus, std::string> docking_txs_;
  std::optional<Millis> mode_switch_time_;
  std::uint64_t rejected_ = 0;

  std::vector<SimEvent> events_;
  std::vector<TrajectorySample> trajectory_;
  std::vector<LocalizationSample> localization_log_;
  std::vector<DetectionEvent> detections_;
};

}  // namespace chainfleet::fleetsim
