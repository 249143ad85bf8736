#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "glosa/fuel.hpp"

using namespace glosa;

namespace {

const VehicleParams kSrx = VehicleParams::cadillac_srx_2014();

// Resistance -> power -> rate, written out from the raw constants.
double oracle_rate(double v, double a, double grade) {
  const double vk = 3.6 * v;
  const double r = 1.2256 / 25.91 * 0.39 * 0.95 * 3.33 * vk * vk +
                   2388.0 * 9.8066 * 1.75 / 1000.0 * (0.0328 * vk + 4.55) + 2388.0 * 9.8066 * grade;
  const double p = (r + 1.04 * 2388.0 * a) / (3600.0 * 0.92) * vk;
  if (p < 0.0) return 7.89e-4;
  return 7.89e-4 + -5.77e-19 * p + 2.27e-6 * p * p;
}

RoadParams graded(double g) {
  RoadParams r;
  r.grade = g;
  r.speed_limit_mps = 40.0;
  return r;
}

Trajectory hold(double v, double seconds, double dt) {
  Trajectory t;
  t.dt_s = dt;
  VehicleState s;
  s.speed_mps = v;
  t.states.push_back(s);
  for (int k = 1; k * dt <= seconds + 1e-12; ++k) {
    s.time_s = k * dt;
    s.position_m += v * dt;
    s.control = Control::brake(0.0);
    s.accel_mps2 = 0.0;
    t.states.push_back(s);
  }
  return t;
}

}  // namespace

TEST(VehiclePower, HandValues) {
  const double r = resistance_force(17.88, kSrx, RoadParams{});
  EXPECT_NEAR(vehicle_power(17.88, 0.0, r, kSrx), 10.01, 0.02);
  EXPECT_NEAR(vehicle_power(17.88, 2.962, r, kSrx), 152.9, 0.2);
  EXPECT_LT(vehicle_power(10.0, -3.0, r, kSrx), 0.0);
}

TEST(FuelRate, HandValues) {
  EXPECT_EQ(fuel_rate(-50.0, kSrx), 7.89e-4);
  EXPECT_EQ(fuel_rate(0.0, kSrx), 7.89e-4);
  EXPECT_NEAR(fuel_rate(10.01, kSrx), 1.0165e-3, 1e-7);
}

TEST(FuelRate, IdleFloorAndMonotone) {
  for (double p = -200.0; p < 0.0; p += 3.7) EXPECT_EQ(fuel_rate(p, kSrx), fuel_rate(0.0, kSrx));
  double prev = fuel_rate(0.0, kSrx);
  for (double p = 0.5; p < 250.0; p += 0.5) {
    const double f = fuel_rate(p, kSrx);
    EXPECT_GE(f, prev);
    prev = f;
  }
}

TEST(TrajectoryFuel, EmptyAndSingleState) {
  EXPECT_EQ(trajectory_fuel(Trajectory{}, kSrx, RoadParams{}), 0.0);
  Trajectory one;
  one.states.push_back(VehicleState{});
  EXPECT_EQ(trajectory_fuel(one, kSrx, RoadParams{}), 0.0);
}

TEST(TrajectoryFuel, IdlingMinute) {
  EXPECT_NEAR(trajectory_fuel(hold(0.0, 60.0, 0.5), kSrx, RoadParams{}), 0.04734, 1e-12);
}

TEST(TrajectoryFuel, Cruise250m) {
  // 250 m at 17.88 m/s is 13.98 s; one step's rate times the duration.
  const double rate = oracle_rate(17.88, 0.0, 0.0);
  const double seconds = 250.0 / 17.88;
  const Trajectory t = hold(17.88, std::floor(seconds / 0.5) * 0.5, 0.5);
  EXPECT_NEAR(trajectory_fuel(t, kSrx, RoadParams{}), rate * std::floor(seconds / 0.5) * 0.5, 1e-15);
  EXPECT_NEAR(rate * seconds, 0.01422, 2e-5);
}

TEST(TrajectoryFuel, OneStepMatchesOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> vd(0.0, 20.0), ad(-6.0, 3.0);
  const double grades[] = {-0.03, 0.0, 0.03};
  for (int i = 0; i < 1000; ++i) {
    const double v = vd(rng), a = ad(rng), g = grades[i % 3];
    Trajectory t;
    VehicleState s0;
    s0.speed_mps = v;
    VehicleState s1 = s0;
    s1.time_s = 0.5;
    s1.accel_mps2 = a;
    t.states = {s0, s1};
    const double want = oracle_rate(v, a, g) * 0.5;
    const double got = trajectory_fuel(t, kSrx, graded(g));
    EXPECT_LE(std::abs(got - want), 1e-12 * want) << v << ' ' << a << ' ' << g;
  }
}

TEST(TrajectoryFuel, AdditiveOverConcatenation) {
  Trajectory whole;
  VehicleState s;
  s.speed_mps = 8.0;
  whole.states.push_back(s);
  for (int k = 0; k < 40; ++k) {
    s = step_dynamics(s, k < 20 ? Control::throttle(0.5) : Control::brake(-1.0), 0.5, kSrx, RoadParams{});
    whole.states.push_back(s);
  }
  Trajectory head, tail;
  head.states.assign(whole.states.begin(), whole.states.begin() + 21);
  tail.states.assign(whole.states.begin() + 20, whole.states.end());
  EXPECT_NEAR(trajectory_fuel(whole, kSrx, RoadParams{}),
              trajectory_fuel(head, kSrx, RoadParams{}) + trajectory_fuel(tail, kSrx, RoadParams{}), 1e-15);
}

TEST(StepFuelRates, FirstEntryZeroAndAligned) {
  const Trajectory t = hold(10.0, 5.0, 0.5);
  const auto rates = step_fuel_rates(t, kSrx, RoadParams{});
  ASSERT_EQ(rates.size(), t.size());
  EXPECT_EQ(rates[0], 0.0);
  for (std::size_t k = 1; k < rates.size(); ++k) EXPECT_NEAR(rates[k], oracle_rate(10.0, 0.0, 0.0), 1e-15);
}
