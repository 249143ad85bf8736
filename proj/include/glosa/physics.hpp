#pragma once

// Precomputed force/power/fuel coefficients shared by the scalar model
// functions and the batched rollout kernels. Every kernel variant evaluates
// these expressions in the same operation order so results are bitwise equal.

#include <algorithm>

#include "glosa/vehicle.hpp"

namespace glosa {

struct PhysicsCoeffs {
  double mass = 0.0;
  double aero_k = 0.0;       // rho / 25.91 * Cd * Ch * Af, N per (km/h)^2
  double roll_k = 0.0;       // m * g * cr0 / 1000
  double roll_c1 = 0.0;
  double roll_c2 = 0.0;
  double grade_force = 0.0;  // m * g * G
  double power_k = 0.0;      // 3600 * eta_d * beta * P_max, N * km/h at full throttle
  double tire_limit = 0.0;   // M_ta * g * mu
  double speed_floor_kmh = kSpeedFloorKmh;
  double inertia_mass = 0.0;  // 1.04 * m
  double power_div = 0.0;     // 3600 * eta_d
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;

  static PhysicsCoeffs make(const VehicleParams& v, const RoadParams& r) {
    PhysicsCoeffs c;
    c.mass = v.mass_kg;
    c.aero_k = v.air_density_kg_m3 / 25.91 * v.drag_coeff * v.altitude_factor * v.frontal_area_m2;
    c.roll_k = v.mass_kg * r.gravity_mps2 * v.rolling_c0 / 1000.0;
    c.roll_c1 = v.rolling_c1;
    c.roll_c2 = v.rolling_c2;
    c.grade_force = v.mass_kg * r.gravity_mps2 * r.grade;
    c.power_k = 3600.0 * v.driveline_efficiency * v.gear_factor * v.max_power_kW;
    c.tire_limit = v.tractive_mass_fraction * v.mass_kg * r.gravity_mps2 * v.friction_coeff;
    c.inertia_mass = 1.04 * v.mass_kg;
    c.power_div = 3600.0 * v.driveline_efficiency;
    c.alpha0 = v.fuel_alpha0;
    c.alpha1 = v.fuel_alpha1;
    c.alpha2 = v.fuel_alpha2;
    return c;
  }
};

namespace physics {

inline double resistance(const PhysicsCoeffs& c, double speed_mps) {
  const double vk = kMpsToKmh * speed_mps;
  return c.aero_k * vk * vk + c.roll_k * (c.roll_c1 * vk + c.roll_c2) + c.grade_force;
}

inline double throttle_force(const PhysicsCoeffs& c, double throttle, double speed_mps) {
  const double vk = std::max(kMpsToKmh * speed_mps, c.speed_floor_kmh);
  return std::min(c.power_k * throttle / vk, c.tire_limit);
}

inline double power_kw(const PhysicsCoeffs& c, double speed_mps, double accel_mps2, double resistance_n) {
  const double vk = kMpsToKmh * speed_mps;
  return (resistance_n + c.inertia_mass * accel_mps2) * vk / c.power_div;
}

inline double fuel_rate(const PhysicsCoeffs& c, double power) {
  return power >= 0.0 ? c.alpha0 + c.alpha1 * power + c.alpha2 * power * power : c.alpha0;
}

}  // namespace physics
}  // namespace glosa
