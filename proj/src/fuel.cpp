#include "glosa/fuel.hpp"

#include "glosa/kernels.hpp"
#include "glosa/physics.hpp"

namespace glosa {

double vehicle_power(double speed_mps, double accel_mps2, double resistance_N, const VehicleParams& vehicle) {
  return physics::power_kw(PhysicsCoeffs::make(vehicle, RoadParams{}), speed_mps, accel_mps2, resistance_N);
}

double fuel_rate(double power_kW, const VehicleParams& vehicle) {
  return physics::fuel_rate(PhysicsCoeffs::make(vehicle, RoadParams{}), power_kW);
}

FuelRecord fuel_record(double speed_mps, double accel_mps2, const VehicleParams& vehicle, const RoadParams& road) {
  const auto c = PhysicsCoeffs::make(vehicle, road);
  const double p = physics::power_kw(c, speed_mps, accel_mps2, physics::resistance(c, speed_mps));
  return {p, physics::fuel_rate(c, p)};
}

std::vector<double> step_fuel_rates(const Trajectory& trajectory, const VehicleParams& vehicle,
                                    const RoadParams& road) {
  const std::size_t n = trajectory.size();
  std::vector<double> rates(n, 0.0);
  if (n < 2) return rates;
  std::vector<double> speed(n - 1), accel(n - 1);
  for (std::size_t k = 1; k < n; ++k) {
    speed[k - 1] = trajectory.states[k - 1].speed_mps;
    accel[k - 1] = trajectory.states[k].accel_mps2;
  }
  kernels::fuel_rates(PhysicsCoeffs::make(vehicle, road), speed, accel, std::span(rates).subspan(1));
  return rates;
}

double trajectory_fuel(const Trajectory& trajectory, const VehicleParams& vehicle, const RoadParams& road) {
  double total = 0.0;
  for (double r : step_fuel_rates(trajectory, vehicle, road)) total += r * trajectory.dt_s;
  return total;
}

}  // namespace glosa
