#include "glosa/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace glosa {

namespace {

enum class Mode { Cruise, Braking, Stopped, Accelerating };

constexpr double kInf = std::numeric_limits<double>::infinity();

double speed_gain_to_zero(double accel, double jerk_step, double dt) {
  double gain = 0.0;
  for (double a = accel - jerk_step; a > 0.0; a -= jerk_step) gain += a * dt;
  return gain;
}

// Largest acceleration within the jerk band, at most `target`, that can
// still be eased back to zero without overshooting `v_des`.
double ease_in(double target, double v, double a, double v_des, double js, double dt) {
  const double hi = std::min(a + js, std::max(target, a - js));
  for (const double c : {hi, std::clamp(a, a - js, hi), a - js}) {
    if (c <= 0.0 || v + c * dt + speed_gain_to_zero(c, js, dt) <= v_des + 1e-9) return c;
  }
  return a - js;
}

}  // namespace

std::vector<std::string> BaselineParams::violations() const {
  std::vector<std::string> out;
  if (!(comfort_decel_mps2 < 0.0)) out.emplace_back("BaselineParams.comfort_decel_mps2 < 0");
  if (!(accel_throttle > 0.0 && accel_throttle <= 1.0)) out.emplace_back("BaselineParams.accel_throttle in (0, 1]");
  if (!(reaction_time_s >= 0.0)) out.emplace_back("BaselineParams.reaction_time_s >= 0");
  if (!(stop_short_m >= 0.0)) out.emplace_back("BaselineParams.stop_short_m >= 0");
  return out;
}

Trajectory baseline_trajectory(const SignalTiming& timing, double v0_mps, const VehicleParams& vehicle,
                               const RoadParams& road, const OptimizerConfig& config, const BaselineParams& params) {
  const double dt = config.dt_s;
  const double js = config.jerk_step();
  const double jerk = config.jerk_limit_mps3;
  const double comfort = std::abs(params.comfort_decel_mps2);
  const double stop_point = config.stop_bar_m() - params.stop_short_m;
  const double v_des = std::min(config.desired_exit_speed_mps, road.speed_limit_mps);
  const double go_time = timing.red_at_start ? timing.true_switch_time_s + params.reaction_time_s : 0.0;

  Trajectory traj;
  traj.dt_s = dt;
  VehicleState s;
  s.speed_mps = std::min(v0_mps, road.speed_limit_mps);
  s.control = control_for_accel(0.0, s.speed_mps, vehicle, road, config.max_brake_mps2);
  traj.states.push_back(s);
  traj.info.emplace_back();

  Mode mode = Mode::Cruise;
  for (int step = 0; step < config.step_cap && s.position_m < config.exit_m(); ++step) {
    const bool red = timing.is_red(s.time_s);
    const double v = s.speed_mps;
    const double a = s.accel_mps2;
    const double rem = stop_point - s.position_m;

    if (mode == Mode::Cruise && red && v > 0.0) {
      // Start braking once a comfortable stop, plus the jerk-limited ramp
      // into it, needs all the remaining room.
      const double needed = v * v / (2.0 * comfort) + v * comfort / (2.0 * jerk);
      if (rem <= needed) mode = Mode::Braking;
    }
    if ((mode == Mode::Braking || mode == Mode::Stopped) && s.time_s >= go_time) mode = Mode::Accelerating;
    if (mode == Mode::Braking && v == 0.0) mode = Mode::Stopped;
    if (mode == Mode::Accelerating && v >= v_des - 1e-9 && a <= js) mode = Mode::Cruise;

    double target = 0.0;
    switch (mode) {
      case Mode::Cruise:
        target = v < v_des - 1e-9 ? std::sqrt(2.0 * jerk * (v_des - v)) : 0.0;
        break;
      case Mode::Braking:
        target = rem > 0.0 ? -v * v / (2.0 * rem) : config.max_brake_mps2;
        break;
      case Mode::Stopped:
        target = 0.0;
        break;
      case Mode::Accelerating: {
        const double f = tractive_force(Control::throttle(params.accel_throttle), v, vehicle, road);
        const double a_pedal = (f - resistance_force(v, vehicle, road)) / vehicle.mass_kg;
        target = std::min(a_pedal, std::sqrt(2.0 * jerk * std::max(0.0, v_des - v)));
        break;
      }
    }

    // Jerk clamp, then ease off early enough to come to rest gently or to
    // settle at the desired speed.
    double next = std::clamp(target, a - js, a + js);
    if (next > 0.0) next = std::max(0.0, ease_in(target, v, a, v_des, js, dt));
    next = std::max(next, config.max_brake_mps2);
    if (mode == Mode::Braking || mode == Mode::Stopped) {
      const double stop = -v / dt;
      if (v > 0.0 && stop >= -js && stop >= a - js && next <= stop) {
        next = stop * (1.0 + 1e-12);
      } else if (next < 0.0 && v + next * dt < speed_shed_to_zero_accel(next, js, dt)) {
        next = std::min(a + js, 0.0);
      }
      if (v == 0.0) next = std::max(next, 0.0);
    }

    Control c = control_for_accel(next, v, vehicle, road, config.max_brake_mps2);
    VehicleState n = step_dynamics(s, c, dt, vehicle, road);
    bool forced = false;
    if (red && !stop_envelope_clear(n, kInf, config)) {
      // Never run the red light: fall back to the firmest jerk-limited stop.
      c = control_for_accel(comfort_stop_accel(v, a, config), v, vehicle, road, config.max_brake_mps2);
      n = step_dynamics(s, c, dt, vehicle, road);
      if (mode == Mode::Cruise) mode = Mode::Braking;
      if (!stop_envelope_clear(n, kInf, config)) {
        c = Control::brake(config.max_brake_mps2);
        n = step_dynamics(s, c, dt, vehicle, road);
        forced = true;
      }
    }
    s = n;
    traj.states.push_back(s);
    StepInfo info;
    info.forced = forced;
    traj.info.push_back(info);
  }
  return traj;
}

double fuel_savings(const Trajectory& optimized, const Trajectory& base, const VehicleParams& vehicle,
                    const RoadParams& road) {
  const double fb = trajectory_fuel(base, vehicle, road);
  const double fo = trajectory_fuel(optimized, vehicle, road);
  return 100.0 * (fb - fo) / fb;
}

}  // namespace glosa
