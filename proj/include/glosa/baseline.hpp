#pragma once

#include <string>
#include <vector>

#include "glosa/fuel.hpp"
#include "glosa/optimizer.hpp"
#include "glosa/spat.hpp"
#include "glosa/vehicle.hpp"

namespace glosa {

/// Synthetic uninformed driver: sees the light, not the timing.
struct BaselineParams {
  double comfort_decel_mps2 = -2.0;
  double accel_throttle = 0.6;
  double reaction_time_s = 1.0;
  double stop_short_m = 2.0;  // aims to stop this far before the bar

  std::vector<std::string> violations() const;
};

/// Cruise at v0; brake late but comfortably when the light is red, stop
/// short of the bar, wait for green plus the reaction time, then pull away
/// at `accel_throttle` until the desired speed. Geometry, step and jerk
/// bound come from `config`.
Trajectory baseline_trajectory(const SignalTiming& timing, double v0_mps, const VehicleParams& vehicle,
                               const RoadParams& road, const OptimizerConfig& config,
                               const BaselineParams& params = {});

/// 100 * (fuel(base) - fuel(optimized)) / fuel(base).
double fuel_savings(const Trajectory& optimized, const Trajectory& base, const VehicleParams& vehicle,
                    const RoadParams& road);

}  // namespace glosa
