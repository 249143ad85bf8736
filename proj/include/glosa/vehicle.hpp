#pragma once

#include <string>
#include <vector>

namespace glosa {

/// Calibrated physical and fuel constants of a light-duty vehicle.
struct VehicleParams {
  double mass_kg = 2388.0;
  double driveline_efficiency = 0.92;
  double gear_factor = 1.0;
  double max_power_kW = 229.7;
  double frontal_area_m2 = 3.33;
  double drag_coeff = 0.39;
  double altitude_factor = 0.95;
  double air_density_kg_m3 = 1.2256;
  double rolling_c0 = 1.75;
  double rolling_c1 = 0.0328;
  double rolling_c2 = 4.55;
  double tractive_mass_fraction = 0.54;
  double friction_coeff = 0.60;
  double fuel_alpha0 = 7.89e-4;
  double fuel_alpha1 = -5.77e-19;
  double fuel_alpha2 = 2.27e-6;

  /// 2014 Cadillac SRX calibration.
  static VehicleParams cadillac_srx_2014() { return VehicleParams{}; }

  /// Every violated invariant, prefixed with the field name. Empty when valid.
  std::vector<std::string> violations() const;
};

struct RoadParams {
  double grade = 0.0;  // rise over run, signed (downhill < 0)
  double speed_limit_mps = 17.88;
  double gravity_mps2 = 9.8066;

  std::vector<std::string> violations() const;
};

enum class ControlKind { Throttle, Brake };

/// A single scalar decision. Throttle carries the pedal fraction in [0, 1];
/// Brake carries the commanded acceleration in [max_brake, 0].
struct Control {
  ControlKind kind = ControlKind::Throttle;
  double value = 0.0;

  static constexpr Control throttle(double fraction) { return {ControlKind::Throttle, fraction}; }
  static constexpr Control brake(double accel_mps2) { return {ControlKind::Brake, accel_mps2}; }

  bool is_brake() const { return kind == ControlKind::Brake; }
  friend bool operator==(const Control&, const Control&) = default;
};

inline constexpr double kMaxBrakeMps2 = -6.0;
inline constexpr double kSpeedFloorKmh = 5.0;
inline constexpr double kMpsToKmh = 3.6;

bool control_in_bounds(const Control& c, double max_brake_mps2 = kMaxBrakeMps2);
std::string to_string(ControlKind kind);

struct VehicleState {
  double time_s = 0.0;
  double position_m = 0.0;
  double speed_mps = 0.0;
  /// Acceleration applied over the step that produced this state. Equal to
  /// the commanded value unless the zero-speed or speed-limit clamp bound,
  /// in which case it is the realized (v' - v) / dt.
  double accel_mps2 = 0.0;
  Control control{};
};

/// Rolling + aerodynamic + grade resistance, N. Speed is converted to km/h
/// internally to match the calibration units.
double resistance_force(double speed_mps, const VehicleParams& vehicle, const RoadParams& road);

/// Engine force for a throttle command, bounded by the tire adhesion limit.
/// Throws std::invalid_argument for Brake controls.
double tractive_force(const Control& control, double speed_mps, const VehicleParams& vehicle,
                      const RoadParams& road);

/// Adhesion limit M_ta * g * mu, N.
double tire_force_limit(const VehicleParams& vehicle, const RoadParams& road);

/// Acceleration the control commands at the given speed, before any clamping.
double commanded_accel(const Control& control, double speed_mps, const VehicleParams& vehicle,
                       const RoadParams& road);

/// Advance one step: explicit speed update, trapezoidal position update,
/// speed clamped to [0, speed_limit].
VehicleState step_dynamics(const VehicleState& state, const Control& control, double dt_s,
                           const VehicleParams& vehicle, const RoadParams& road);

/// Control whose commanded acceleration at `speed_mps` is as close as possible
/// to `target_mps2`. Targets above the engine's reach saturate at full
/// throttle; targets below max_brake saturate at max_brake.
Control control_for_accel(double target_mps2, double speed_mps, const VehicleParams& vehicle,
                          const RoadParams& road, double max_brake_mps2 = kMaxBrakeMps2);

}  // namespace glosa
