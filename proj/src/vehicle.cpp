#include "glosa/vehicle.hpp"

#include <cmath>
#include <stdexcept>

#include "glosa/physics.hpp"

namespace glosa {

std::vector<std::string> VehicleParams::violations() const {
  std::vector<std::string> out;
  auto require = [&out](bool ok, const char* what) {
    if (!ok) out.emplace_back(what);
  };
  require(mass_kg > 0.0, "VehicleParams.mass_kg > 0");
  require(driveline_efficiency > 0.0 && driveline_efficiency <= 1.0,
          "VehicleParams.driveline_efficiency in (0, 1]");
  require(tractive_mass_fraction > 0.0 && tractive_mass_fraction <= 1.0,
          "VehicleParams.tractive_mass_fraction in (0, 1]");
  require(max_power_kW > 0.0, "VehicleParams.max_power_kW > 0");
  require(friction_coeff > 0.0, "VehicleParams.friction_coeff > 0");
  require(fuel_alpha0 > 0.0, "VehicleParams.fuel_alpha0 > 0");
  require(gear_factor > 0.0, "VehicleParams.gear_factor > 0");
  require(frontal_area_m2 >= 0.0 && drag_coeff >= 0.0 && air_density_kg_m3 >= 0.0,
          "VehicleParams aerodynamic terms >= 0");
  return out;
}

std::vector<std::string> RoadParams::violations() const {
  std::vector<std::string> out;
  if (!(std::abs(grade) < 0.2)) out.emplace_back("RoadParams.grade |G| < 0.2");
  if (!(speed_limit_mps > 0.0)) out.emplace_back("RoadParams.speed_limit_mps > 0");
  if (!(gravity_mps2 > 0.0)) out.emplace_back("RoadParams.gravity_mps2 > 0");
  return out;
}

bool control_in_bounds(const Control& c, double max_brake_mps2) {
  if (c.is_brake()) return c.value >= max_brake_mps2 && c.value <= 0.0;
  return c.value >= 0.0 && c.value <= 1.0;
}

std::string to_string(ControlKind kind) { return kind == ControlKind::Brake ? "brake" : "throttle"; }

double resistance_force(double speed_mps, const VehicleParams& vehicle, const RoadParams& road) {
  return physics::resistance(PhysicsCoeffs::make(vehicle, road), speed_mps);
}

double tractive_force(const Control& control, double speed_mps, const VehicleParams& vehicle,
                      const RoadParams& road) {
  if (control.is_brake()) throw std::invalid_argument("tractive_force: brake control has no engine force");
  return physics::throttle_force(PhysicsCoeffs::make(vehicle, road), control.value, speed_mps);
}

double tire_force_limit(const VehicleParams& vehicle, const RoadParams& road) {
  return PhysicsCoeffs::make(vehicle, road).tire_limit;
}

double commanded_accel(const Control& control, double speed_mps, const VehicleParams& vehicle,
                       const RoadParams& road) {
  if (control.is_brake()) return control.value;
  const auto c = PhysicsCoeffs::make(vehicle, road);
  return (physics::throttle_force(c, control.value, speed_mps) - physics::resistance(c, speed_mps)) / c.mass;
}

VehicleState step_dynamics(const VehicleState& state, const Control& control, double dt_s,
                           const VehicleParams& vehicle, const RoadParams& road) {
  if (!(dt_s > 0.0)) throw std::invalid_argument("step_dynamics: dt must be positive");
  const double v = state.speed_mps;
  const double a = commanded_accel(control, v, vehicle, road);
  const double cap = road.speed_limit_mps;

  double v1 = v + a * dt_s;
  double a_rec = a;
  if (v1 > cap) {
    v1 = cap;
    a_rec = (cap - v) / dt_s;
  } else if (v1 < 0.0) {
    v1 = 0.0;
    a_rec = (0.0 - v) / dt_s;
  }

  VehicleState next;
  next.time_s = state.time_s + dt_s;
  next.position_m = state.position_m + (v + v1) * 0.5 * dt_s;
  next.speed_mps = v1;
  next.accel_mps2 = a_rec;
  next.control = control;
  return next;
}

Control control_for_accel(double target_mps2, double speed_mps, const VehicleParams& vehicle,
                          const RoadParams& road, double max_brake_mps2) {
  const auto c = PhysicsCoeffs::make(vehicle, road);
  const double r = physics::resistance(c, speed_mps);
  const double a_coast = (0.0 - r) / c.mass;

  if (target_mps2 >= a_coast) {
    const double needed = target_mps2 * c.mass + r;
    if (needed >= physics::throttle_force(c, 1.0, speed_mps)) return Control::throttle(1.0);
    const double vk = std::max(kMpsToKmh * speed_mps, c.speed_floor_kmh);
    const double f = needed * vk / c.power_k;
    return Control::throttle(std::clamp(f, 0.0, 1.0));
  }
  if (target_mps2 <= 0.0) return Control::brake(std::max(target_mps2, max_brake_mps2));
  // Downhill gap (0, a_coast): neither pedal reaches it exactly.
  return (target_mps2 < 0.5 * a_coast) ? Control::brake(0.0) : Control::throttle(0.0);
}

}  // namespace glosa
