#include <cassert>

#include "glosa/kernels.hpp"

namespace glosa::kernels {

void rollout_scalar(const PhysicsCoeffs& c, const RolloutSpec& spec, const LaneControls& lanes,
                    RolloutLanes& out) {
  const std::size_t n = lanes.size();
  out.resize(n);
  const double dt = spec.dt;
  for (std::size_t i = 0; i < n; ++i) {
    const bool is_brake = lanes.brake_flag[i] > 0.5;
    const double throttle = lanes.throttle[i];
    const double brake = lanes.brake_accel[i];

    double x = spec.x0;
    double v = spec.v0;
    double fuel = 0.0;
    std::int32_t steps = 0;
    bool reached = false;
    bool clear = true;
    for (int k = 0; k < spec.max_steps; ++k) {
      if (x >= spec.x_target) {
        reached = true;
        break;
      }
      const double r = physics::resistance(c, v);
      const double f = physics::throttle_force(c, throttle, v);
      const double a_thr = (f - r) / c.mass;
      const double a = is_brake ? brake : a_thr;
      double v1 = v + a * dt;
      double a_used = a;
      if (v1 > spec.v_cap) {
        v1 = spec.v_cap;
        a_used = (spec.v_cap - v) / dt;
      } else if (v1 < 0.0) {
        v1 = 0.0;
        a_used = (0.0 - v) / dt;
      }
      const double p = physics::power_kw(c, v, a_used, r);
      fuel += physics::fuel_rate(c, p) * dt;
      x += (v + v1) * 0.5 * dt;
      v = v1;
      ++steps;
      if (k + 1 < spec.max_steps && spec.zone_bar - x <= v * v / spec.zone_div) clear = false;
      if (spec.stop_on_stall && v == 0.0 && a <= 0.0) break;
    }
    if (x >= spec.x_target) reached = true;
    out.x[i] = x;
    out.v[i] = v;
    out.fuel[i] = fuel;
    out.steps[i] = steps;
    out.reached[i] = reached ? 1 : 0;
    out.clear[i] = clear ? 1 : 0;
  }
}

void fuel_rates_scalar(const PhysicsCoeffs& c, std::span<const double> speed,
                       std::span<const double> accel, std::span<double> out) {
  assert(speed.size() == accel.size() && out.size() == speed.size());
  for (std::size_t i = 0; i < speed.size(); ++i) {
    const double r = physics::resistance(c, speed[i]);
    out[i] = physics::fuel_rate(c, physics::power_kw(c, speed[i], accel[i], r));
  }
}

}  // namespace glosa::kernels
