#pragma once

#include <limits>
#include <vector>

#include "glosa/vehicle.hpp"

namespace glosa {

struct FuelRecord {
  double power_kW = 0.0;
  double fuel_rate_Lps = 0.0;
};

/// Planner bookkeeping attached to each trajectory state.
struct StepInfo {
  double predicted_switch_s = std::numeric_limits<double>::quiet_NaN();
  double upstream_cost_L = std::numeric_limits<double>::quiet_NaN();
  double downstream_cost_L = std::numeric_limits<double>::quiet_NaN();
  bool forced = false;  // control was the red-light emergency brake
};

/// Time-ordered states at a uniform step. states[k].accel_mps2 and
/// states[k].control describe the step from k-1 to k; states[0] is the
/// initial condition. `info` is either empty or aligned with `states`.
struct Trajectory {
  double dt_s = 0.5;
  std::vector<VehicleState> states;
  std::vector<StepInfo> info;

  bool empty() const { return states.empty(); }
  std::size_t size() const { return states.size(); }
  const VehicleState& back() const { return states.back(); }
  bool forced_at(std::size_t k) const { return k < info.size() && info[k].forced; }
};

/// Instantaneous power, kW. Negative while decelerating.
double vehicle_power(double speed_mps, double accel_mps2, double resistance_N, const VehicleParams& vehicle);

/// VT-CPFM-1 rate, L/s. Idle rate alpha0 for non-positive power.
double fuel_rate(double power_kW, const VehicleParams& vehicle);

FuelRecord fuel_record(double speed_mps, double accel_mps2, const VehicleParams& vehicle, const RoadParams& road);

/// Fuel rate of each step (index k covers states[k-1] -> states[k]; entry 0
/// is 0). Evaluated at the step's starting speed and applied acceleration.
std::vector<double> step_fuel_rates(const Trajectory& trajectory, const VehicleParams& vehicle,
                                    const RoadParams& road);

/// Total fuel in litres. Empty or single-state trajectories burn nothing.
double trajectory_fuel(const Trajectory& trajectory, const VehicleParams& vehicle, const RoadParams& road);

}  // namespace glosa
