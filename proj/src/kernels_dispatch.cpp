#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "glosa/kernels.hpp"

namespace glosa::kernels {

namespace {

SimdLevel detect() {
  if (const char* env = std::getenv("GLOSA_SIMD"); env && std::strcmp(env, "scalar") == 0) {
    return SimdLevel::Scalar;
  }
  return avx2_supported() ? SimdLevel::Avx2 : SimdLevel::Scalar;
}

std::atomic<SimdLevel>& level_slot() {
  static std::atomic<SimdLevel> level{detect()};
  return level;
}

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported;
#else
  return false;
#endif
}

SimdLevel active_simd_level() { return level_slot().load(std::memory_order_relaxed); }

void set_simd_level(SimdLevel level) {
  if (level == SimdLevel::Avx2 && !avx2_supported()) {
    throw std::runtime_error("AVX2 requested but not supported by this CPU");
  }
  level_slot().store(level, std::memory_order_relaxed);
}

const char* to_string(SimdLevel level) { return level == SimdLevel::Avx2 ? "avx2" : "scalar"; }

void rollout(const PhysicsCoeffs& c, const RolloutSpec& spec, const LaneControls& lanes,
             RolloutLanes& out) {
  if (active_simd_level() == SimdLevel::Avx2) {
    rollout_avx2(c, spec, lanes, out);
  } else {
    rollout_scalar(c, spec, lanes, out);
  }
}

void fuel_rates(const PhysicsCoeffs& c, std::span<const double> speed, std::span<const double> accel,
                std::span<double> out) {
  if (active_simd_level() == SimdLevel::Avx2) {
    fuel_rates_avx2(c, speed, accel, out);
  } else {
    fuel_rates_scalar(c, speed, accel, out);
  }
}

}  // namespace glosa::kernels
