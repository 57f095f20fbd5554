#include "chainfleet/localization/localization.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace chainfleet::localization {

const char* to_string(LocalizationMode mode) { return mode == LocalizationMode::Global ? "global" : "relative"; }

const char* to_string(LocalizationErrc code) {
  switch (code) {
    case LocalizationErrc::NoAnchors: return "NoAnchors";
    case LocalizationErrc::DegenerateGeometry: return "DegenerateGeometry";
    case LocalizationErrc::UnknownAnchor: return "UnknownAnchor";
    case LocalizationErrc::UnknownRobot: return "UnknownRobot";
    case LocalizationErrc::InvalidMode: return "InvalidMode";
  }
  return "LocalizationError";
}

std::vector<RangeMeasurement> measure_ranges(const Vec3& tag, std::span<const Anchor> anchors, double sigma,
                                             NormalSampler& rng, Millis t) {
  std::vector<RangeMeasurement> out;
  for (const auto& anchor : anchors) {
    if (!anchor.enabled) continue;
    const double truth = (tag - anchor.position).norm();
    const double noisy = truth + sigma * rng.standard();
    out.push_back(RangeMeasurement{anchor.id, std::max(0.0, noisy), truth, t});
  }
  if (out.empty()) throw LocalizationError(LocalizationErrc::NoAnchors, "no enabled anchors");
  return out;
}

namespace {

using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

struct Problem {
  std::vector<Vec3> anchors;
  VecX ranges;
  int dim = 3;
  double fixed_z = 0;

  Vec3 point(const VecX& p) const { return dim == 3 ? Vec3(p[0], p[1], p[2]) : Vec3(p[0], p[1], fixed_z); }

  VecX residuals(const VecX& p) const {
    const Vec3 q = point(p);
    VecX r(static_cast<Eigen::Index>(anchors.size()));
    for (std::size_t i = 0; i < anchors.size(); ++i) r[i] = (q - anchors[i]).norm() - ranges[i];
    return r;
  }

  MatX jacobian(const VecX& p) const {
    const Vec3 q = point(p);
    MatX J(static_cast<Eigen::Index>(anchors.size()), dim);
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      const Vec3 diff = q - anchors[i];
      const double n = diff.norm();
      const Vec3 row = n > 1e-12 ? Vec3(diff / n) : Vec3::Zero();
      for (int c = 0; c < dim; ++c) J(static_cast<Eigen::Index>(i), c) = row[c];
    }
    return J;
  }
};

// Affine rank of the anchor cloud in the solved coordinates.
int affine_rank(const std::vector<Vec3>& pts, int dim) {
  if (pts.size() < 2) return 0;
  MatX m(static_cast<Eigen::Index>(pts.size() - 1), dim);
  double scale = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    for (int c = 0; c < dim; ++c) {
      m(static_cast<Eigen::Index>(i - 1), c) = pts[i][c] - pts[0][c];
      scale = std::max(scale, std::abs(m(static_cast<Eigen::Index>(i - 1), c)));
    }
  }
  if (scale == 0) return 0;
  Eigen::FullPivLU<MatX> lu(m / scale);
  lu.setThreshold(1e-9);
  return static_cast<int>(lu.rank());
}

}  // namespace

PositionEstimate multilaterate(std::span<const RangeMeasurement> measurements, std::span<const Anchor> anchors,
                               std::optional<Vec3> initial_guess, const SolverOptions& options) {
  if (measurements.empty()) throw LocalizationError(LocalizationErrc::NoAnchors, "no range measurements");

  Problem problem;
  problem.dim = options.fixed_z ? 2 : 3;
  problem.fixed_z = options.fixed_z.value_or(0.0);
  problem.ranges.resize(static_cast<Eigen::Index>(measurements.size()));
  for (std::size_t i = 0; i < measurements.size(); ++i) {
    const auto& m = measurements[i];
    auto it = std::find_if(anchors.begin(), anchors.end(), [&](const Anchor& a) { return a.id == m.anchor_id; });
    if (it == anchors.end()) throw LocalizationError(LocalizationErrc::UnknownAnchor, m.anchor_id);
    problem.anchors.push_back(it->position);
    problem.ranges[static_cast<Eigen::Index>(i)] = m.measured_distance;
  }

  const auto needed = static_cast<std::size_t>(problem.dim + 1);
  if (problem.anchors.size() < needed || affine_rank(problem.anchors, problem.dim) < problem.dim) {
    throw LocalizationError(LocalizationErrc::DegenerateGeometry,
                            std::to_string(problem.anchors.size()) + " anchors do not span " +
                                std::to_string(problem.dim) + "D");
  }

  Vec3 start = Vec3::Zero();
  if (initial_guess) {
    start = *initial_guess;
  } else {
    for (const auto& a : problem.anchors) start += a;
    start /= static_cast<double>(problem.anchors.size());
  }
  VecX p(problem.dim);
  for (int c = 0; c < problem.dim; ++c) p[c] = start[c];

  auto cost = [&](const VecX& x) { return problem.residuals(x).squaredNorm(); };

  PositionEstimate est;
  int rank_deficient_streak = 0;
  double step_norm = std::numeric_limits<double>::infinity();
  bool stalled = false;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    const VecX r = problem.residuals(p);
    const MatX J = problem.jacobian(p);
    const VecX g = J.transpose() * r;
    if (g.norm() < options.gradient_tolerance) break;

    Eigen::ColPivHouseholderQR<MatX> qr(J);
    qr.setThreshold(1e-10);
    VecX delta;
    if (qr.rank() < problem.dim) {
      if (++rank_deficient_streak >= 3) {
        throw LocalizationError(LocalizationErrc::DegenerateGeometry, "rank-deficient Jacobian");
      }
      const MatX H = J.transpose() * J;
      const double lambda = 1e-6 * (1.0 + H.trace());
      delta = (H + lambda * MatX::Identity(problem.dim, problem.dim)).ldlt().solve(-g);
    } else {
      rank_deficient_streak = 0;
      delta = qr.solve(-r);
    }

    const double f0 = r.squaredNorm();
    double scale = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h) {
      const VecX candidate = p + scale * delta;
      if (cost(candidate) < f0) {
        p = candidate;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) {
      stalled = true;
      ++iter;
      break;
    }
    step_norm = (scale * delta).norm();
    if (step_norm < options.step_tolerance) {
      ++iter;
      break;
    }
  }

  const VecX r = problem.residuals(p);
  const VecX g = problem.jacobian(p).transpose() * r;
  est.position = problem.point(p);
  est.iterations = iter;
  est.gradient_norm = g.norm();
  est.residual_rms = std::sqrt(r.squaredNorm() / static_cast<double>(r.size()));
  est.converged = est.gradient_norm < options.gradient_tolerance ||
                  (!stalled && step_norm < options.step_tolerance && iter < options.max_iterations + 1);
  if (stalled && est.gradient_norm < std::sqrt(options.gradient_tolerance)) {
    // No representable descent left: converged to machine precision.
    est.converged = true;
  }
  return est;
}

Vec3 body_to_world(const CarrierPose& pose, const Vec3& offset) {
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  return pose.position + Vec3(c * offset.x() - s * offset.y(), s * offset.x() + c * offset.y(), offset.z());
}

Vec3 world_to_body(const CarrierPose& pose, const Vec3& point) {
  const Vec3 d = point - pose.position;
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  return Vec3(c * d.x() + s * d.y(), -s * d.x() + c * d.y(), d.z());
}

AnchorTable::AnchorTable(std::vector<Anchor> global, std::vector<Anchor> robot_mounted)
    : global_(std::move(global)), mounted_(std::move(robot_mounted)) {
  for (auto& a : global_) {
    a.set = AnchorSet::Global;
    a.carrier.reset();
  }
  for (auto& a : mounted_) {
    a.set = AnchorSet::RobotMounted;
    if (!a.carrier) throw LocalizationError(LocalizationErrc::UnknownRobot, "mounted anchor " + a.id + " has no carrier");
    carriers_.try_emplace(*a.carrier);
  }
}

void AnchorTable::register_tag(const std::string& robot_id, bool allow_relative) {
  std::lock_guard lock(mu_);
  tags_[robot_id] = {LocalizationMode::Global, allow_relative};
}

bool AnchorTable::set_mode(const std::string& robot_id, LocalizationMode mode) {
  std::lock_guard lock(mu_);
  auto it = tags_.find(robot_id);
  if (it == tags_.end()) throw LocalizationError(LocalizationErrc::UnknownRobot, robot_id);
  if (mode == LocalizationMode::Relative && (!it->second.second || mounted_.empty())) {
    throw LocalizationError(LocalizationErrc::InvalidMode, robot_id + " cannot use relative localization");
  }
  const bool changed = it->second.first != mode;
  it->second.first = mode;
  return changed;
}

LocalizationMode AnchorTable::mode(const std::string& robot_id) const {
  std::lock_guard lock(mu_);
  auto it = tags_.find(robot_id);
  if (it == tags_.end()) throw LocalizationError(LocalizationErrc::UnknownRobot, robot_id);
  return it->second.first;
}

std::vector<Anchor> AnchorTable::anchors_for(const std::string& robot_id) const {
  std::lock_guard lock(mu_);
  auto it = tags_.find(robot_id);
  if (it == tags_.end()) throw LocalizationError(LocalizationErrc::UnknownRobot, robot_id);
  const bool relative = it->second.first == LocalizationMode::Relative;
  std::vector<Anchor> out;
  out.reserve(global_.size() + mounted_.size());
  for (auto a : global_) {
    a.enabled = !relative;
    out.push_back(std::move(a));
  }
  for (auto a : mounted_) {
    a.position = body_to_world(carriers_.at(*a.carrier), a.body_offset);
    a.enabled = relative;
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<Anchor> AnchorTable::enabled_anchors(const std::string& robot_id) const {
  auto all = anchors_for(robot_id);
  std::erase_if(all, [](const Anchor& a) { return !a.enabled; });
  return all;
}

std::vector<Anchor> AnchorTable::mounted_in_body_frame() const {
  std::lock_guard lock(mu_);
  std::vector<Anchor> out = mounted_;
  for (auto& a : out) a.position = a.body_offset;
  return out;
}

void AnchorTable::update_carrier_pose(const std::string& carrier, const CarrierPose& pose) {
  std::lock_guard lock(mu_);
  auto it = carriers_.find(carrier);
  if (it == carriers_.end()) throw LocalizationError(LocalizationErrc::UnknownRobot, carrier);
  it->second = pose;
}

std::vector<Anchor> default_global_anchors(double width, double depth, double low_z, double high_z) {
  return {
      Anchor{"A0", Vec3(0, 0, low_z), AnchorSet::Global, true, std::nullopt, Vec3::Zero()},
      Anchor{"A1", Vec3(width, 0, high_z), AnchorSet::Global, true, std::nullopt, Vec3::Zero()},
      Anchor{"A2", Vec3(width, depth, low_z), AnchorSet::Global, true, std::nullopt, Vec3::Zero()},
      Anchor{"A3", Vec3(0, depth, high_z), AnchorSet::Global, true, std::nullopt, Vec3::Zero()},
  };
}

std::vector<Anchor> default_mounted_anchors(const std::string& carrier, double radius, double deck_height) {
  auto mounted = [&](std::string id, Vec3 offset) {
    return Anchor{std::move(id), offset, AnchorSet::RobotMounted, false, carrier, offset};
  };
  return {
      mounted("R0", Vec3(radius, 0, deck_height + 0.35)),
      mounted("R1", Vec3(0, radius, deck_height + 0.05)),
      mounted("R2", Vec3(-radius, 0, deck_height + 0.35)),
      mounted("R3", Vec3(0, -radius, deck_height + 0.05)),
      mounted("RC", Vec3(0, 0, deck_height)),
  };
}

}  // namespace chainfleet::localization
