#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "chainfleet/common/random.hpp"
#include "chainfleet/common/time.hpp"

namespace chainfleet::localization {

using Vec3 = Eigen::Vector3d;

enum class AnchorSet { Global, RobotMounted };
enum class LocalizationMode { Global, Relative };

const char* to_string(LocalizationMode mode);

enum class LocalizationErrc { NoAnchors, DegenerateGeometry, UnknownAnchor, UnknownRobot, InvalidMode };

const char* to_string(LocalizationErrc code);

class LocalizationError : public std::runtime_error {
 public:
  LocalizationError(LocalizationErrc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  LocalizationErrc code() const noexcept { return code_; }

 private:
  LocalizationErrc code_;
};

struct Anchor {
  std::string id;
  Vec3 position = Vec3::Zero();  // world frame
  AnchorSet set = AnchorSet::Global;
  bool enabled = true;
  std::optional<std::string> carrier;  // robot_mounted only
  Vec3 body_offset = Vec3::Zero();     // carrier body frame, robot_mounted only
};

struct RangeMeasurement {
  std::string anchor_id;
  double measured_distance = 0;  // >= 0
  double true_distance = 0;
  Millis t{0};
};

struct PositionEstimate {
  Vec3 position = Vec3::Zero();
  double residual_rms = 0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0;
};

/// measured = max(0, true + sigma * n) for each enabled anchor, in anchor order.
/// One NormalSampler draw is consumed per enabled anchor even when sigma is 0,
/// so the stream position does not depend on the noise level.
/// Throws LocalizationError(NoAnchors) when no anchor is enabled.
std::vector<RangeMeasurement> measure_ranges(const Vec3& tag, std::span<const Anchor> anchors, double sigma,
                                             NormalSampler& rng, Millis t = Millis{0});

struct SolverOptions {
  int max_iterations = 100;
  int max_halvings = 8;
  double gradient_tolerance = 1e-9;
  double step_tolerance = 1e-10;
  // Solve for x, y only with z pinned (ground robots).
  std::optional<double> fixed_z;
};

/// Gauss-Newton on sum_i (|p - a_i| - d_i)^2 with step halving.
///
/// Needs at least 4 anchors spanning 3D, or 3 non-collinear anchors when z is
/// fixed; otherwise throws DegenerateGeometry. The initial guess defaults to
/// the centroid of the anchors referenced by the measurements. Running out of
/// iterations returns the last iterate with converged = false.
PositionEstimate multilaterate(std::span<const RangeMeasurement> measurements, std::span<const Anchor> anchors,
                               std::optional<Vec3> initial_guess = std::nullopt, const SolverOptions& options = {});

/// Planar pose of an anchor carrier: position plus yaw.
struct CarrierPose {
  Vec3 position = Vec3::Zero();
  double heading = 0;  // rad, about +z
};

Vec3 body_to_world(const CarrierPose& pose, const Vec3& offset);
Vec3 world_to_body(const CarrierPose& pose, const Vec3& point);

/// Anchor enablement per tag, shared across agents.
///
/// In global mode a tag sees only global anchors; in relative mode only the
/// robot-mounted set. Robot-mounted anchor positions follow their carrier.
class AnchorTable {
 public:
  AnchorTable(std::vector<Anchor> global, std::vector<Anchor> robot_mounted);

  // allow_relative = false for tags that must stay on the global set (ground robots).
  void register_tag(const std::string& robot_id, bool allow_relative);

  // Returns true when the mode changed. Throws UnknownRobot / InvalidMode.
  bool set_mode(const std::string& robot_id, LocalizationMode mode);
  LocalizationMode mode(const std::string& robot_id) const;

  // Every anchor with `enabled` set for this tag, robot-mounted ones in world frame.
  std::vector<Anchor> anchors_for(const std::string& robot_id) const;
  std::vector<Anchor> enabled_anchors(const std::string& robot_id) const;
  // Robot-mounted anchors with position = body offset, for solving in the carrier frame.
  std::vector<Anchor> mounted_in_body_frame() const;

  void update_carrier_pose(const std::string& carrier, const CarrierPose& pose);

 private:
  mutable std::mutex mu_;
  std::vector<Anchor> global_;
  std::vector<Anchor> mounted_;
  std::map<std::string, CarrierPose, std::less<>> carriers_;
  std::map<std::string, std::pair<LocalizationMode, bool>, std::less<>> tags_;
};

/// Four room anchors at the floor corners, alternating between low and high mounting heights.
std::vector<Anchor> default_global_anchors(double width, double depth, double low_z = 0.3, double high_z = 2.5);

/// Five anchors on the carrier: four on a ring of `radius` on posts of
/// alternating height plus one at the deck centre.
std::vector<Anchor> default_mounted_anchors(const std::string& carrier, double radius = 0.4,
                                            double deck_height = 0.1);

}  // namespace chainfleet::localization
