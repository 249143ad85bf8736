#pragma once

// Batched constant-control roll-outs and fuel-rate evaluation.
//
// The planner's inner loop costs many candidate policies from the same start
// state. Each lane holds one control fixed and integrates the vehicle forward;
// lanes are independent, so they map onto SIMD registers. A scalar reference
// and an AVX2 variant are provided and selected at runtime. Both produce
// bitwise-identical results (no FMA contraction, same operation order).

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "glosa/physics.hpp"
#include "glosa/vehicle.hpp"

namespace glosa::kernels {

enum class SimdLevel { Scalar, Avx2 };

bool avx2_supported();
SimdLevel active_simd_level();
/// Override the runtime selection. Throws std::runtime_error when the CPU
/// lacks the requested level.
void set_simd_level(SimdLevel level);
const char* to_string(SimdLevel level);

/// Structure-of-arrays lane controls.
struct LaneControls {
  std::vector<double> throttle;
  std::vector<double> brake_accel;
  std::vector<double> brake_flag;  // 1.0 for Brake lanes, 0.0 for Throttle lanes

  void push(const Control& c) {
    throttle.push_back(c.is_brake() ? 0.0 : c.value);
    brake_accel.push_back(c.is_brake() ? c.value : 0.0);
    brake_flag.push_back(c.is_brake() ? 1.0 : 0.0);
  }
  void clear() {
    throttle.clear();
    brake_accel.clear();
    brake_flag.clear();
  }
  std::size_t size() const { return throttle.size(); }
};

struct RolloutSpec {
  double x0 = 0.0;
  double v0 = 0.0;
  double dt = 0.5;
  double v_cap = 0.0;      // speed clamp (limit or exit target)
  double x_target = 0.0;   // lane finishes once position reaches this
  int max_steps = 0;
  bool stop_on_stall = false;  // finish a lane once stopped with non-positive accel
  // A lane loses `clear` when a state before its final step lies within
  // v^2 / zone_div of zone_bar. +inf disables the check.
  double zone_bar = std::numeric_limits<double>::infinity();
  double zone_div = 12.0;
};

struct RolloutLanes {
  std::vector<double> x;
  std::vector<double> v;
  std::vector<double> fuel;
  std::vector<std::int32_t> steps;
  std::vector<std::uint8_t> reached;
  std::vector<std::uint8_t> clear;

  void resize(std::size_t n) {
    x.assign(n, 0.0);
    v.assign(n, 0.0);
    fuel.assign(n, 0.0);
    steps.assign(n, 0);
    reached.assign(n, 0);
    clear.assign(n, 1);
  }
};

void rollout_scalar(const PhysicsCoeffs& c, const RolloutSpec& spec, const LaneControls& lanes,
                    RolloutLanes& out);
void rollout_avx2(const PhysicsCoeffs& c, const RolloutSpec& spec, const LaneControls& lanes,
                  RolloutLanes& out);
/// Dispatches to the active level.
void rollout(const PhysicsCoeffs& c, const RolloutSpec& spec, const LaneControls& lanes,
             RolloutLanes& out);

/// out[i] = fuel rate (L/s) at speed[i] with acceleration accel[i].
void fuel_rates_scalar(const PhysicsCoeffs& c, std::span<const double> speed,
                       std::span<const double> accel, std::span<double> out);
void fuel_rates_avx2(const PhysicsCoeffs& c, std::span<const double> speed,
                     std::span<const double> accel, std::span<double> out);
void fuel_rates(const PhysicsCoeffs& c, std::span<const double> speed, std::span<const double> accel,
                std::span<double> out);

}  // namespace glosa::kernels
