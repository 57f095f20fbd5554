#include "chainfleet/fleetsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "chainfleet/chaincode/contracts.hpp"
#include "chainfleet/chaincode/errors.hpp"
#include "chainfleet/common/text.hpp"

namespace chainfleet::fleetsim {

using chaincode::DockingStatus;
using localization::AnchorSet;
using localization::CarrierPose;

namespace {

constexpr double kArrival = 0.1;      // m, waypoint reached
constexpr double kSameObject = 0.5;   // m, sightings merged into one inventory row
constexpr double kCell = 0.5;         // m, inventory id grid

double horizontal(const Vec3& v) { return std::hypot(v.x(), v.y()); }

double seconds(Millis ms) { return static_cast<double>(ms.count()) / 1000.0; }

std::string path_chaincode(const std::string& robot) { return robot + "-path"; }
std::string objects_chaincode(const std::string& robot) { return robot + "-objects"; }

}  // namespace

const char* to_string(MissionMode mode) {
  switch (mode) {
    case MissionMode::Inspect: return "inspect";
    case MissionMode::ToRendezvous: return "to_rendezvous";
    case MissionMode::AwaitDock: return "await_dock";
    case MissionMode::Docking: return "docking";
    case MissionMode::Docked: return "docked";
  }
  return "unknown";
}

std::string cell_object_id(const std::string& category, const Vec3& position) {
  std::string id = category;
  std::replace(id.begin(), id.end(), ' ', '-');
  for (int axis = 0; axis < 3; ++axis) id += "_" + std::to_string(std::lround(position[axis] / kCell));
  return id;
}

std::vector<DetectionEvent> Detector::detect(const RobotState& robot, std::span<const PlacedObject> objects,
                                             NormalSampler& rng, Millis now) {
  std::vector<DetectionEvent> out;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const Vec3 d = objects[i].position - robot.true_pose;
    if (d.norm() > params_.range_m) continue;
    if (horizontal(d) > 1e-9) {
      const double bearing = std::remainder(std::atan2(d.y(), d.x()) - robot.heading, 2 * std::numbers::pi);
      if (std::abs(bearing) > params_.fov_rad / 2) continue;
    }
    auto seen = last_seen_.find(i);
    if (seen != last_seen_.end() && now - seen->second < params_.cooldown) continue;
    last_seen_[i] = now;

    Vec3 est = objects[i].position;
    for (int axis = 0; axis < 3; ++axis) est[axis] += params_.noise_sigma * rng.standard();
    out.push_back({now, robot.robot_id, objects[i].category, est, cell_object_id(objects[i].category, est)});
  }
  return out;
}

std::uint64_t Simulation::Schedule::due(Millis now) const {
  return static_cast<std::uint64_t>(std::floor(static_cast<double>(now.count()) * hz / 1000.0 + 1e-9)) + 1;
}

Simulation::Simulation(Scenario scenario)
    : scenario_(std::move(scenario)),
      ugv_detector_(scenario_.detection),
      uav_detector_(scenario_.detection),
      ugv_ranging_(derive_seed(scenario_.seed, 1)),
      uav_ranging_(derive_seed(scenario_.seed, 2)),
      ugv_detect_rng_(derive_seed(scenario_.seed, 3)),
      uav_detect_rng_(derive_seed(scenario_.seed, 4)) {
  validate(scenario_);
  const auto& ugv_spec = scenario_.ugv();
  const auto& uav_spec = scenario_.uav();

  ledger_ = std::make_unique<ledger::Ledger>(scenario_.ledger);
  std::vector<std::string> orgs;
  for (const auto* spec : {&ugv_spec, &uav_spec}) {
    identities_[spec->id] = ledger_->register_identity(spec->org, spec->id, ledger::Role::Robot);
    if (std::find(orgs.begin(), orgs.end(), spec->org) == orgs.end()) orgs.push_back(spec->org);
  }
  ledger_->create_channel(scenario_.channel, orgs, Millis{0});
  const chaincode::Point3 rdv{scenario_.rendezvous.x(), scenario_.rendezvous.y(), scenario_.rendezvous.z()};
  ledger_->install_chaincode(scenario_.channel, "battery",
                             std::make_shared<chaincode::BatteryContract>(
                                 chaincode::BatteryPolicy{scenario_.battery.threshold, rdv}));
  for (const auto* spec : {&uav_spec, &ugv_spec}) {
    ledger_->install_chaincode(scenario_.channel, path_chaincode(spec->id),
                               std::make_shared<chaincode::PathRecorder>(spec->id));
    ledger_->install_chaincode(scenario_.channel, objects_chaincode(spec->id),
                               std::make_shared<chaincode::ObjectRecorder>(spec->id, chaincode::coco_categories()));
  }

  std::vector<localization::Anchor> global;
  for (const auto& a : scenario_.uwb.global_anchors) {
    global.push_back({a.id, a.position, AnchorSet::Global, true, std::nullopt, Vec3::Zero()});
  }
  std::vector<localization::Anchor> mounted;
  for (const auto& a : scenario_.uwb.mounted_anchors) {
    mounted.push_back({a.id, a.position, AnchorSet::RobotMounted, false, ugv_spec.id, a.position});
  }
  anchors_ = std::make_unique<localization::AnchorTable>(std::move(global), std::move(mounted));
  anchors_->register_tag(ugv_spec.id, false);
  anchors_->register_tag(uav_spec.id, true);

  auto init = [](RobotState& state, const RobotSpec& spec, double battery) {
    state.robot_id = spec.id;
    state.kind = spec.kind;
    state.true_pose = spec.start;
    state.est_pose.position = spec.start;
    state.battery = battery;
    if (!spec.waypoints.empty()) {
      const Vec3 d = spec.waypoints.front() - spec.start;
      if (horizontal(d) > 1e-9) state.heading = std::atan2(d.y(), d.x());
    }
  };
  init(ugv_, ugv_spec, 1.0);
  init(uav_, uav_spec, scenario_.battery.initial);

  ugv_path_.hz = uav_path_.hz = scenario_.rates.path_hz;
  battery_.hz = scenario_.rates.battery_hz;
  ugv_detect_.hz = uav_detect_.hz = scenario_.rates.detect_forward_hz;
}

Simulation::~Simulation() = default;

void Simulation::step() {
  ledger_->advance(now_);
  react_to_chain();
  if (now_.count() > 0) {
    move(ugv_);
    move(uav_);
    drain_battery();
  }
  anchors_->update_carrier_pose(ugv_.robot_id, CarrierPose{ugv_.true_pose, ugv_.heading});
  localize(ugv_);
  localize(uav_);
  check_landing();
  run_detection(ugv_, ugv_detector_, ugv_detect_rng_, ugv_detect_);
  run_detection(uav_, uav_detector_, uav_detect_rng_, uav_detect_);
  submit_scheduled();
  record_samples();
  now_ += scenario_.dt;
}

void Simulation::run() {
  while (!done()) step();
  flush();
}

void Simulation::flush() {
  Millis horizon = now_;
  for (int i = 0; i < 4 && ledger_->pending_count() > 0; ++i) {
    horizon += scenario_.ledger.batch_timeout + scenario_.ledger.validation_budget + Millis{1};
    ledger_->advance(horizon);
  }
}

const ledger::Identity& Simulation::identity(const RobotState& robot) const { return identities_.at(robot.robot_id); }

Vec3 Simulation::deck_center() const { return ugv_.true_pose + Vec3(0, 0, scenario_.docking.deck_height); }

double Simulation::uav_deck_distance() const { return (uav_.true_pose - deck_center()).norm(); }

CarrierPose Simulation::ugv_estimated_pose() const { return CarrierPose{ugv_.est_pose.position, ugv_.heading}; }

void Simulation::log(const std::string& robot_id, const std::string& event, const std::string& detail) {
  events_.push_back({now_, robot_id, event, detail});
}

std::optional<std::string> Simulation::submit(const RobotState& robot, const std::string& chaincode,
                                              const std::string& function, const std::vector<std::string>& args) {
  try {
    return ledger_->submit(identity(robot), scenario_.channel, chaincode, function, args, now_);
  } catch (const chaincode::ContractError& e) {
    ++rejected_;
    log(robot.robot_id, "submit_rejected", chaincode + " " + function + ": " + e.what());
    return std::nullopt;
  }
}

void Simulation::set_mode(RobotState& robot, MissionMode mode) {
  if (robot.mode == mode) return;
  log(robot.robot_id, "mode", std::string(to_string(robot.mode)) + "->" + to_string(mode));
  robot.mode = mode;
}

void Simulation::react_to_chain() {
  const auto raw = ledger_->query_state(scenario_.channel, std::string(chaincode::kDockingOrderKey));
  if (raw && raw->version != docking_version_) {
    docking_version_ = raw->version;
    const auto order = chaincode::Document::parse(raw->value).get<chaincode::DockingOrder>();
    const DockingStatus previous = docking_status_;
    docking_status_ = order.status;
    log("fleet", "docking_status", chaincode::to_string(order.status));

    auto crossed = [&](DockingStatus s) { return previous < s && docking_status_ >= s; };
    if (crossed(DockingStatus::Ordered)) {
      set_mode(ugv_, MissionMode::ToRendezvous);
      set_mode(uav_, MissionMode::ToRendezvous);
      if (auto tx = submit(ugv_, "battery", "AdvanceDocking", {"accepted", std::to_string(now_.count())})) {
        docking_txs_[DockingStatus::Accepted] = *tx;
        log(ugv_.robot_id, "submit", "AdvanceDocking accepted " + *tx);
      }
    }
    if (crossed(DockingStatus::Docking)) {
      set_mode(ugv_, MissionMode::Docking);
      set_mode(uav_, MissionMode::Docking);
      if (anchors_->set_mode(uav_.robot_id, LocalizationMode::Relative)) {
        uav_.loc_mode = LocalizationMode::Relative;
        mode_switch_time_ = now_;
        uav_raw_relative_.reset();
        log(uav_.robot_id, "loc_mode", "global->relative");
      }
    }
    if (crossed(DockingStatus::Docked)) {
      set_mode(ugv_, MissionMode::Docked);
      set_mode(uav_, MissionMode::Docked);
    }
  }

  if (docking_status_ == DockingStatus::Accepted && !docking_txs_.contains(DockingStatus::Docking)) {
    const double r = scenario_.docking.r_rdv;
    if (horizontal(ugv_.est_pose.position - scenario_.rendezvous) <= r &&
        horizontal(uav_.est_pose.position - scenario_.rendezvous) <= r) {
      if (auto tx = submit(ugv_, "battery", "AdvanceDocking", {"docking", std::to_string(now_.count())})) {
        docking_txs_[DockingStatus::Docking] = *tx;
        log(ugv_.robot_id, "submit", "AdvanceDocking docking " + *tx);
      }
    }
  }
}

void Simulation::move(RobotState& robot) {
  const RobotSpec& spec = robot.kind == RobotKind::Ugv ? scenario_.ugv() : scenario_.uav();
  Vec3 target;
  switch (robot.mode) {
    case MissionMode::Inspect:
      while (robot.next_waypoint < spec.waypoints.size() &&
             (spec.waypoints[robot.next_waypoint] - robot.est_pose.position).norm() < kArrival) {
        ++robot.next_waypoint;
      }
      if (robot.next_waypoint >= spec.waypoints.size()) return;
      target = spec.waypoints[robot.next_waypoint];
      break;
    case MissionMode::ToRendezvous:
      target = scenario_.rendezvous;
      if (robot.kind == RobotKind::Uav) target.z() = scenario_.docking.approach_height;
      if ((target - robot.est_pose.position).norm() < kArrival) {
        set_mode(robot, MissionMode::AwaitDock);
        return;
      }
      break;
    case MissionMode::Docking:
      if (robot.kind == RobotKind::Uav && !landed_) move_uav_docking();
      return;
    case MissionMode::AwaitDock:
    case MissionMode::Docked:
      return;
  }

  const Vec3 delta = target - robot.est_pose.position;
  const double dist = delta.norm();
  if (dist < 1e-9) return;
  const Vec3 motion = delta / dist * std::min(spec.v_max * seconds(scenario_.dt), dist);
  robot.true_pose += motion;
  const auto& room = scenario_.room;
  robot.true_pose.x() = std::clamp(robot.true_pose.x(), 0.0, room.width);
  robot.true_pose.y() = std::clamp(robot.true_pose.y(), 0.0, room.depth);
  robot.true_pose.z() = robot.kind == RobotKind::Ugv ? 0.0 : std::clamp(robot.true_pose.z(), 0.0, room.height);
  if (horizontal(motion) > 1e-9) robot.heading = std::atan2(motion.y(), motion.x());
}

void Simulation::move_uav_docking() {
  const auto& dock = scenario_.docking;
  const double reach = dock.descent_speed * seconds(scenario_.dt);
  const Vec3 r = uav_relative_;

  Vec3 body = Vec3::Zero();
  const double off = std::hypot(r.x(), r.y());
  if (off > 1e-9) {
    const double lateral = std::min(reach, off);
    body.x() = -r.x() / off * lateral;
    body.y() = -r.y() / off * lateral;
  }
  if (off <= dock.d_dock / 3) body.z() = -std::min(reach, std::max(0.0, r.z() - dock.deck_height));

  const double c = std::cos(ugv_.heading);
  const double s = std::sin(ugv_.heading);
  uav_.true_pose += Vec3(c * body.x() - s * body.y(), s * body.x() + c * body.y(), body.z());
  uav_.true_pose.z() = std::max(uav_.true_pose.z(), deck_center().z());
}

void Simulation::drain_battery() {
  const double dt = seconds(scenario_.dt);
  if (uav_.mode == MissionMode::Docked) {
    uav_.battery = std::min(1.0, uav_.battery + scenario_.battery.charge_per_s * dt);
  } else {
    uav_.battery = std::max(0.0, uav_.battery - scenario_.battery.drain_per_s * dt);
  }
}

void Simulation::localize(RobotState& robot) {
  const bool is_uav = robot.kind == RobotKind::Uav;
  NormalSampler& rng = is_uav ? uav_ranging_ : ugv_ranging_;
  const auto enabled = anchors_->enabled_anchors(robot.robot_id);
  LocalizationSample sample{now_, robot.robot_id, Vec3::Zero(), 0, robot.loc_mode, 0, 0};
  for (const auto& a : enabled) ++(a.set == AnchorSet::Global ? sample.global_anchors : sample.mounted_anchors);

  const auto ranges = localization::measure_ranges(robot.true_pose, enabled, scenario_.uwb.sigma, rng, now_);
  const double alpha = scenario_.uwb.filter_alpha;

  if (is_uav && robot.loc_mode == LocalizationMode::Relative) {
    const auto body_anchors = anchors_->mounted_in_body_frame();
    const Vec3 guess = uav_raw_relative_.value_or(localization::world_to_body(ugv_estimated_pose(), robot.est_pose.position));
    const auto fix = localization::multilaterate(ranges, body_anchors, guess);
    uav_relative_ = uav_raw_relative_ ? Vec3(alpha * fix.position + (1 - alpha) * uav_relative_) : fix.position;
    uav_raw_relative_ = fix.position;
    robot.est_pose = fix;
    robot.est_pose.position = localization::body_to_world(ugv_estimated_pose(), uav_relative_);
  } else {
    localization::SolverOptions options;
    if (!is_uav) options.fixed_z = 0.0;
    auto warm = raw_fix_.find(robot.robot_id);
    const auto fix = localization::multilaterate(
        ranges, enabled, warm == raw_fix_.end() ? std::nullopt : std::optional<Vec3>(warm->second), options);
    const Vec3 filtered = warm == raw_fix_.end() ? fix.position : Vec3(alpha * fix.position + (1 - alpha) * robot.est_pose.position);
    raw_fix_[robot.robot_id] = fix.position;
    robot.est_pose = fix;
    robot.est_pose.position = filtered;
  }
  sample.position = robot.est_pose.position;
  sample.residual_rms = robot.est_pose.residual_rms;
  localization_log_.push_back(sample);
}

void Simulation::check_landing() {
  if (uav_.mode != MissionMode::Docking || landed_ || uav_.loc_mode != LocalizationMode::Relative) return;
  const auto& dock = scenario_.docking;
  const Vec3 r = uav_relative_;
  if (std::hypot(r.x(), r.y()) > dock.d_dock || r.z() > dock.deck_height + dock.land_clearance) return;
  landed_ = true;
  uav_.true_pose.z() = deck_center().z();
  log(uav_.robot_id, "landed", "offset " + format_fixed(horizontal(uav_.true_pose - deck_center()), 3) + " m");
  if (auto tx = submit(uav_, "battery", "AdvanceDocking", {"docked", std::to_string(now_.count())})) {
    docking_txs_[DockingStatus::Docked] = *tx;
    log(uav_.robot_id, "submit", "AdvanceDocking docked " + *tx);
  }
}

void Simulation::run_detection(RobotState& robot, Detector& detector, NormalSampler& rng, Schedule& schedule) {
  const auto due = schedule.due(now_);
  if (schedule.issued >= due) return;
  schedule.issued = due;

  auto events = detector.detect(robot, scenario_.objects, rng, now_);
  if (events.empty()) return;

  const auto chaincode = objects_chaincode(robot.robot_id);
  const auto listing = chaincode::Document::parse(
      ledger_->evaluate(identity(robot), scenario_.channel, chaincode, "QueryAll", {std::string(chaincode::kObjectPrefix)}));
  std::vector<chaincode::ObjectRecord> known;
  for (const auto& row : listing) known.push_back(row.at("value").get<chaincode::ObjectRecord>());

  for (auto& ev : events) {
    double best = kSameObject;
    for (const auto& k : known) {
      const double d = (Vec3(k.x, k.y, k.z) - ev.estimated_object_position).norm();
      if (k.category == ev.category && d <= best) {
        best = d;
        ev.object_id = k.object_id;
      }
    }
    const auto& p = ev.estimated_object_position;
    submit(robot, chaincode, "RecordObject",
           {ev.object_id, ev.category, format_double(p.x()), format_double(p.y()), format_double(p.z()),
            std::to_string(now_.count())});
    log(robot.robot_id, "detection", ev.object_id);
    detections_.push_back(std::move(ev));
  }
}

void Simulation::submit_scheduled() {
  const std::string t = std::to_string(now_.count());
  for (auto* pair : {&ugv_, &uav_}) {
    RobotState& robot = *pair;
    Schedule& schedule = robot.kind == RobotKind::Ugv ? ugv_path_ : uav_path_;
    const auto& p = robot.est_pose.position;
    for (const auto due = schedule.due(now_); schedule.issued < due; ++schedule.issued) {
      submit(robot, path_chaincode(robot.robot_id), "RecordPath",
             {t, format_double(p.x()), format_double(p.y()), format_double(p.z())});
    }
  }
  for (const auto due = battery_.due(now_); battery_.issued < due; ++battery_.issued) {
    submit(uav_, "battery", "UpdateBattery", {uav_.robot_id, format_double(uav_.battery), t});
  }
}

void Simulation::record_samples() {
  for (const auto* robot : {&ugv_, &uav_}) {
    trajectory_.push_back({now_, robot->robot_id, robot->true_pose, robot->est_pose.position});
  }
}

}  // namespace chainfleet::fleetsim
