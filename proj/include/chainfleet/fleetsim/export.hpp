#pragma once

#include <iosfwd>
#include <span>

#include "chainfleet/fleetsim/simulation.hpp"

namespace chainfleet::fleetsim {

// t_ms,robot_id,event,detail
void write_events_csv(std::ostream& out, std::span<const SimEvent> events);
// t_ms,robot_id,true_x,true_y,true_z,est_x,est_y,est_z
void write_trajectories_csv(std::ostream& out, std::span<const TrajectorySample> samples);
// t_ms,robot_id,x,y,z,residual_rms,mode
void write_localization_csv(std::ostream& out, std::span<const LocalizationSample> samples);

}  // namespace chainfleet::fleetsim
