#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "glosa/vehicle.hpp"

using namespace glosa;

namespace {

// Independent evaluation from the raw calibration numbers.
double oracle_resistance(double v_mps, double grade) {
  const double vk = v_mps * 3.6;
  const double aero = 1.2256 / 25.91 * 0.39 * 0.95 * 3.33 * vk * vk;
  const double rolling = 2388.0 * 9.8066 * 1.75 / 1000.0 * (0.0328 * vk + 4.55);
  return aero + rolling + 2388.0 * 9.8066 * grade;
}

double oracle_tractive(double throttle, double v_mps) {
  const double vk = std::max(v_mps * 3.6, 5.0);
  return std::min(3600.0 * throttle * 0.92 * 1.0 * 229.7 / vk, 0.54 * 2388.0 * 9.8066 * 0.6);
}

const VehicleParams kSrx = VehicleParams::cadillac_srx_2014();

RoadParams flat() { return RoadParams{}; }
RoadParams graded(double g) {
  RoadParams r;
  r.grade = g;
  return r;
}

}  // namespace

TEST(VehicleParams, SrxMatchesCalibrationTable) {
  EXPECT_EQ(kSrx.mass_kg, 2388.0);
  EXPECT_EQ(kSrx.driveline_efficiency, 0.92);
  EXPECT_EQ(kSrx.gear_factor, 1.0);
  EXPECT_EQ(kSrx.max_power_kW, 229.7);
  EXPECT_EQ(kSrx.frontal_area_m2, 3.33);
  EXPECT_EQ(kSrx.drag_coeff, 0.39);
  EXPECT_EQ(kSrx.altitude_factor, 0.95);
  EXPECT_EQ(kSrx.air_density_kg_m3, 1.2256);
  EXPECT_EQ(kSrx.rolling_c0, 1.75);
  EXPECT_EQ(kSrx.rolling_c1, 0.0328);
  EXPECT_EQ(kSrx.rolling_c2, 4.55);
  EXPECT_EQ(kSrx.tractive_mass_fraction, 0.54);
  EXPECT_EQ(kSrx.fuel_alpha0, 7.89e-4);
  EXPECT_EQ(kSrx.fuel_alpha1, -5.77e-19);
  EXPECT_EQ(kSrx.fuel_alpha2, 2.27e-6);
  EXPECT_TRUE(kSrx.violations().empty());
}

TEST(VehicleParams, ViolationsListEveryField) {
  VehicleParams p;
  p.mass_kg = 0.0;
  p.driveline_efficiency = 1.5;
  p.fuel_alpha0 = 0.0;
  EXPECT_EQ(p.violations().size(), 3u);
  RoadParams r;
  r.grade = 0.25;
  r.speed_limit_mps = 0.0;
  EXPECT_EQ(r.violations().size(), 2u);
}

TEST(Resistance, HandValues) {
  EXPECT_NEAR(resistance_force(0.0, kSrx, flat()), 186.5, 0.05);
  EXPECT_NEAR(resistance_force(0.0, kSrx, flat()), oracle_resistance(0.0, 0.0), 1e-9);
  EXPECT_NEAR(resistance_force(17.88, kSrx, flat()), 515.1, 0.5);
  EXPECT_NEAR(resistance_force(17.88, kSrx, flat()), oracle_resistance(17.88, 0.0), 1e-9);
  EXPECT_NEAR(resistance_force(0.0, kSrx, graded(0.03)), 889.0, 0.1);
}

TEST(Resistance, MatchesOracleEverywhere) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> v(0.0, 25.0), g(-0.1, 0.1);
  for (int i = 0; i < 500; ++i) {
    const double vi = v(rng), gi = g(rng);
    const double want = oracle_resistance(vi, gi);
    EXPECT_NEAR(resistance_force(vi, kSrx, graded(gi)), want, 1e-12 * std::max(1.0, std::abs(want)));
  }
}

TEST(Resistance, StrictlyIncreasingInSpeed) {
  double prev = resistance_force(0.0, kSrx, flat());
  for (double v = 0.1; v < 30.0; v += 0.1) {
    const double r = resistance_force(v, kSrx, flat());
    EXPECT_GT(r, prev);
    prev = r;
  }
}

TEST(Resistance, GradeSymmetry) {
  for (double v = 0.0; v < 25.0; v += 0.7) {
    const double diff = resistance_force(v, kSrx, graded(0.03)) - resistance_force(v, kSrx, graded(-0.03));
    EXPECT_NEAR(diff, 2.0 * 2388.0 * 9.8066 * 0.03, 1e-9);
  }
}

TEST(Tractive, HandValues) {
  EXPECT_EQ(tractive_force(Control::throttle(0.0), 10.0, kSrx, flat()), 0.0);
  EXPECT_NEAR(tractive_force(Control::throttle(1.0), 17.88, kSrx, flat()), 7587.5, 1.0);
  EXPECT_NEAR(tractive_force(Control::throttle(1.0), 0.0, kSrx, flat()), 7587.5, 1.0);
  EXPECT_NEAR(tire_force_limit(kSrx, flat()), 0.54 * 2388.0 * 9.8066 * 0.6, 1e-9);
  // The power branch at 64.37 km/h is larger than the tire limit.
  EXPECT_GT(3600.0 * 0.92 * 229.7 / 64.368, 11800.0);
}

TEST(Tractive, BoundedByTireLimitAndMatchesOracle) {
  const double limit = tire_force_limit(kSrx, flat());
  for (double f = 0.0; f <= 1.0 + 1e-12; f += 0.05) {
    for (double v = 0.0; v < 30.0; v += 0.25) {
      const double t = tractive_force(Control::throttle(f), v, kSrx, flat());
      EXPECT_LE(t, limit);
      EXPECT_NEAR(t, oracle_tractive(f, v), 1e-9);
    }
  }
}

TEST(Tractive, BrakeHasNoEngineForce) {
  EXPECT_THROW(tractive_force(Control::brake(-1.0), 5.0, kSrx, flat()), std::invalid_argument);
}

TEST(StepDynamics, FullThrottleAcceleration) {
  // (F - R) / m with F at the tire limit, R at 17.88 m/s. The limit keeps
  // the step below the cap for this check.
  RoadParams r = flat();
  r.speed_limit_mps = 40.0;
  VehicleState s;
  s.speed_mps = 17.88;
  const VehicleState n = step_dynamics(s, Control::throttle(1.0), 0.5, kSrx, r);
  EXPECT_NEAR(n.accel_mps2, 2.962, 0.002);
  EXPECT_NEAR(n.accel_mps2, (oracle_tractive(1.0, 17.88) - oracle_resistance(17.88, 0.0)) / 2388.0, 1e-12);
}

TEST(StepDynamics, ZeroAccelerationCruise) {
  VehicleState s;
  s.speed_mps = 17.88;
  const VehicleState n = step_dynamics(s, Control::brake(0.0), 0.5, kSrx, flat());
  EXPECT_EQ(n.speed_mps, 17.88);
  EXPECT_NEAR(n.position_m, 8.94, 1e-12);
  EXPECT_EQ(n.time_s, 0.5);
}

TEST(StepDynamics, SpeedClampsAtZero) {
  VehicleState s;
  s.speed_mps = 0.5;
  const VehicleState n = step_dynamics(s, Control::brake(-6.0), 0.5, kSrx, flat());
  EXPECT_EQ(n.speed_mps, 0.0);
  EXPECT_DOUBLE_EQ(n.accel_mps2, -1.0);  // realized, not commanded
  EXPECT_NEAR(n.position_m, 0.125, 1e-12);
}

TEST(StepDynamics, SpeedClampsAtLimit) {
  VehicleState s;
  s.speed_mps = 17.5;
  const VehicleState n = step_dynamics(s, Control::throttle(1.0), 0.5, kSrx, flat());
  EXPECT_EQ(n.speed_mps, 17.88);
  EXPECT_NEAR(n.accel_mps2, (17.88 - 17.5) / 0.5, 1e-12);
}

TEST(StepDynamics, NeverLeavesSpeedBounds) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> v(0.0, 17.88), u(0.0, 1.0), b(-6.0, 0.0);
  for (int i = 0; i < 2000; ++i) {
    VehicleState s;
    s.speed_mps = v(rng);
    const Control c = (i % 2) ? Control::throttle(u(rng)) : Control::brake(b(rng));
    const VehicleState n = step_dynamics(s, c, 0.5, kSrx, graded(i % 3 == 0 ? -0.03 : 0.03));
    EXPECT_GE(n.speed_mps, 0.0);
    EXPECT_LE(n.speed_mps, 17.88);
    EXPECT_GE(n.position_m, s.position_m);
  }
}

TEST(StepDynamics, RejectsNonPositiveStep) {
  EXPECT_THROW(step_dynamics(VehicleState{}, Control::throttle(0.0), 0.0, kSrx, flat()), std::invalid_argument);
}

TEST(StepDynamics, CruiseFixedPoint) {
  // Throttle with F = R exactly keeps the speed constant.
  const double v0 = 12.0;
  const double f = resistance_force(v0, kSrx, graded(0.03)) * v0 * 3.6 / (3600.0 * 0.92 * 229.7);
  VehicleState s;
  s.speed_mps = v0;
  for (int k = 0; k < 200; ++k) s = step_dynamics(s, Control::throttle(f), 0.5, kSrx, graded(0.03));
  EXPECT_NEAR(s.speed_mps, v0, 1e-9);
}

TEST(ControlForAccel, HitsReachableTargets) {
  for (double v : {0.0, 5.0, 12.0, 17.0}) {
    for (double a : {-3.0, -0.2, 0.0, 0.4, 1.5}) {
      const Control c = control_for_accel(a, v, kSrx, flat());
      EXPECT_TRUE(control_in_bounds(c));
      EXPECT_NEAR(commanded_accel(c, v, kSrx, flat()), a, 1e-9) << "v=" << v << " a=" << a;
    }
  }
  EXPECT_EQ(control_for_accel(9.0, 10.0, kSrx, flat()), Control::throttle(1.0));
  EXPECT_EQ(control_for_accel(-9.0, 10.0, kSrx, flat()), Control::brake(-6.0));
}

TEST(Control, Bounds) {
  EXPECT_TRUE(control_in_bounds(Control::throttle(1.0)));
  EXPECT_FALSE(control_in_bounds(Control::throttle(1.2)));
  EXPECT_FALSE(control_in_bounds(Control::brake(0.1)));
  EXPECT_FALSE(control_in_bounds(Control::brake(-6.5)));
  EXPECT_TRUE(control_in_bounds(Control::brake(-6.0)));
}
