#pragma once

#include <optional>
#include <string>
#include <vector>

#include "glosa/fuel.hpp"
#include "glosa/spat.hpp"
#include "glosa/vehicle.hpp"

namespace glosa {

struct OptimizerConfig {
  double dt_s = 0.5;
  std::vector<double> throttle_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> brake_grid = {-6.0, -5.5, -5.0, -4.5, -4.0, -3.5, -3.0, -2.5, -2.0, -1.5, -1.0, -0.5};
  double jerk_limit_mps3 = 1.3;
  double max_brake_mps2 = kMaxBrakeMps2;
  double upstream_length_m = 250.0;
  double downstream_length_m = 180.0;
  double desired_exit_speed_mps = 17.88;
  int step_cap = 600;
  int rollout_step_cap = 1000;
  /// A downstream roll-out counts as reaching the exit speed within this band.
  double exit_speed_tolerance_mps = 0.1;
  /// Clearance kept between a worst-case emergency stop and the stop bar.
  double stop_margin_m = 0.1;

  double stop_bar_m() const { return upstream_length_m; }
  double exit_m() const { return upstream_length_m + downstream_length_m; }
  double jerk_step() const { return jerk_limit_mps3 * dt_s; }

  std::vector<std::string> violations() const;
};

enum class Phase { Upstream, Downstream };

struct PlanState {
  VehicleState vehicle;
  SpatSample last_spat;
  Phase phase = Phase::Upstream;
  double distance_covered_upstream_m = 0.0;  // X_S once the signal has turned green
};

/// v^2 / (2 |max_brake|).
double critical_stopping_distance(double speed_mps, double max_brake_mps2);

/// Distance covered when braking at max_brake from `speed_mps` under the
/// discrete step dynamics. Never less than the continuous value.
double discrete_braking_distance(double speed_mps, double max_brake_mps2, double dt_s);

/// Speed lost while ramping a negative acceleration up to zero at the jerk
/// limit (the acceleration after this step is accel + jerk_step, ...).
double speed_shed_to_zero_accel(double accel_mps2, double jerk_step, double dt_s);

/// Latest time the signal can still be red given a prediction: exact when
/// the prediction has no spread, unbounded otherwise.
double assumed_red_until(const SpatSample& spat);

/// Next acceleration of the comfortable stop: brake as hard as the jerk
/// bound allows while keeping enough speed to ease off to zero at rest.
double comfort_stop_accel(double speed_mps, double accel_mps2, const OptimizerConfig& config);

/// Follows the comfortable stop from `state` and checks that every state
/// before `red_until_s` keeps the critical stopping distance plus the stop
/// margin to the bar. The envelope is time-consistent: its own next step is
/// always clear again, so the planner never has to break the jerk bound to
/// honour a red light.
bool stop_envelope_clear(const VehicleState& state, double red_until_s, const OptimizerConfig& config);

/// Emergency brake while red when the stop bar lies within the critical
/// stopping distance. Callers only invoke it during the red phase.
std::optional<Control> risk_check(const PlanState& state, const OptimizerConfig& config);

struct Candidate {
  Control control;
  VehicleState next;
  double commanded_accel_mps2 = 0.0;
};

/// Controls whose one-step successor honours the jerk bound, the speed limit
/// and, while `red`, stays inside the stop envelope. Constraint
/// tiers relax (comfort look-ahead, then speed limit, then jerk) only when a
/// stricter tier is empty; the red-light clearance is never relaxed. Empty
/// only when no control keeps the vehicle stoppable.
std::vector<Candidate> admissible_controls(const PlanState& state, const OptimizerConfig& config,
                                           const VehicleParams& vehicle, const RoadParams& road, bool red);

struct SectionCost {
  double upstream_L = 0.0;
  double downstream_L = 0.0;
  bool feasible = false;
};

/// Two-section heuristic cost of holding `upstream_control` until the
/// predicted switch, then the best constant downstream control to the exit.
SectionCost two_section_cost(const PlanState& state, const Control& upstream_control, const SpatSample& spat,
                             const OptimizerConfig& config, const VehicleParams& vehicle, const RoadParams& road);

/// Cheapest constant downstream control from (position, speed) to the exit.
/// Roll-outs reaching the exit speed win; otherwise the kinetic-energy
/// shortfall is charged at a rate that dwarfs any fuel difference.
/// +inf when no roll-out covers the distance.
double best_downstream_cost(double position_m, double speed_mps, const OptimizerConfig& config,
                            const VehicleParams& vehicle, const RoadParams& road);

struct Decision {
  Control control;
  bool forced = false;
  double upstream_L = 0.0;
  double downstream_L = 0.0;
};

Decision next_control(const PlanState& state, const SpatSample& spat, const OptimizerConfig& config,
                      const VehicleParams& vehicle, const RoadParams& road);

struct PlanResult {
  Trajectory trajectory;
  bool completed = false;
  std::string diagnostic;
  std::vector<SpatSample> spat_log;
};

/// Receding-horizon loop from `initial` until the exit point or the step cap.
PlanResult plan_trajectory(const VehicleState& initial, SpatStream& stream, const OptimizerConfig& config,
                           const VehicleParams& vehicle, const RoadParams& road);

}  // namespace glosa
