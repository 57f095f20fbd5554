#include "chainfleet/fleetsim/export.hpp"

#include <ostream>

#include "chainfleet/common/text.hpp"

namespace chainfleet::fleetsim {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

void put_vec(std::ostream& out, const Vec3& v) {
  out << ',' << format_fixed(v.x(), 6) << ',' << format_fixed(v.y(), 6) << ',' << format_fixed(v.z(), 6);
}

}  // namespace

void write_events_csv(std::ostream& out, std::span<const SimEvent> events) {
  out << "t_ms,robot_id,event,detail\n";
  for (const auto& e : events) {
    out << e.t.count() << ',' << csv_field(e.robot_id) << ',' << csv_field(e.event) << ',' << csv_field(e.detail) << '\n';
  }
}

void write_trajectories_csv(std::ostream& out, std::span<const TrajectorySample> samples) {
  out << "t_ms,robot_id,true_x,true_y,true_z,est_x,est_y,est_z\n";
  for (const auto& s : samples) {
    out << s.t.count() << ',' << csv_field(s.robot_id);
    put_vec(out, s.truth);
    put_vec(out, s.est);
    out << '\n';
  }
}

void write_localization_csv(std::ostream& out, std::span<const LocalizationSample> samples) {
  out << "t_ms,robot_id,x,y,z,residual_rms,mode\n";
  for (const auto& s : samples) {
    out << s.t.count() << ',' << csv_field(s.robot_id);
    put_vec(out, s.position);
    out << ',' << format_fixed(s.residual_rms, 6) << ',' << localization::to_string(s.mode) << '\n';
  }
}

}  // namespace chainfleet::fleetsim
