// Compiled with -mavx2 (and without FMA) on x86-64.

#include <array>
#include <cassert>
#include <stdexcept>

#include "glosa/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace glosa::kernels {

#if defined(__AVX2__)

namespace {

struct Coeffs4 {
  __m256d mass, aero_k, roll_k, roll_c1, roll_c2, grade_force, power_k, tire_limit, floor_kmh,
      inertia_mass, power_div, alpha0, alpha1, alpha2, kmh;

  explicit Coeffs4(const PhysicsCoeffs& c)
      : mass(_mm256_set1_pd(c.mass)),
        aero_k(_mm256_set1_pd(c.aero_k)),
        roll_k(_mm256_set1_pd(c.roll_k)),
        roll_c1(_mm256_set1_pd(c.roll_c1)),
        roll_c2(_mm256_set1_pd(c.roll_c2)),
        grade_force(_mm256_set1_pd(c.grade_force)),
        power_k(_mm256_set1_pd(c.power_k)),
        tire_limit(_mm256_set1_pd(c.tire_limit)),
        floor_kmh(_mm256_set1_pd(c.speed_floor_kmh)),
        inertia_mass(_mm256_set1_pd(c.inertia_mass)),
        power_div(_mm256_set1_pd(c.power_div)),
        alpha0(_mm256_set1_pd(c.alpha0)),
        alpha1(_mm256_set1_pd(c.alpha1)),
        alpha2(_mm256_set1_pd(c.alpha2)),
        kmh(_mm256_set1_pd(kMpsToKmh)) {}
};

inline __m256d resistance4(const Coeffs4& c, __m256d vk) {
  const __m256d aero = _mm256_mul_pd(_mm256_mul_pd(c.aero_k, vk), vk);
  const __m256d roll = _mm256_mul_pd(c.roll_k, _mm256_add_pd(_mm256_mul_pd(c.roll_c1, vk), c.roll_c2));
  return _mm256_add_pd(_mm256_add_pd(aero, roll), c.grade_force);
}

inline __m256d fuel_rate4(const Coeffs4& c, __m256d p) {
  const __m256d quad = _mm256_add_pd(_mm256_add_pd(c.alpha0, _mm256_mul_pd(c.alpha1, p)),
                                     _mm256_mul_pd(_mm256_mul_pd(c.alpha2, p), p));
  const __m256d nonneg = _mm256_cmp_pd(p, _mm256_setzero_pd(), _CMP_GE_OQ);
  return _mm256_blendv_pd(c.alpha0, quad, nonneg);
}

inline __m256d power4(const Coeffs4& c, __m256d vk, __m256d a, __m256d r) {
  return _mm256_div_pd(_mm256_mul_pd(_mm256_add_pd(r, _mm256_mul_pd(c.inertia_mass, a)), vk), c.power_div);
}

inline bool any(__m256d mask) { return _mm256_movemask_pd(mask) != 0; }

}  // namespace

void rollout_avx2(const PhysicsCoeffs& coeffs, const RolloutSpec& spec, const LaneControls& lanes,
                  RolloutLanes& out) {
  const std::size_t n = lanes.size();
  out.resize(n);
  if (n == 0) return;

  const Coeffs4 c(coeffs);
  const __m256d dt = _mm256_set1_pd(spec.dt);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d cap = _mm256_set1_pd(spec.v_cap);
  const __m256d target = _mm256_set1_pd(spec.x_target);
  const __m256d all_ones = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
  const __m256d stall_enabled = spec.stop_on_stall ? all_ones : zero;
  const __m256d zone_bar = _mm256_set1_pd(spec.zone_bar);
  const __m256d zone_div = _mm256_set1_pd(spec.zone_div);

  for (std::size_t base = 0; base < n; base += 4) {
    // Pad the tail group by repeating the last lane.
    std::array<double, 4> thr{}, brk{}, flag{};
    for (std::size_t j = 0; j < 4; ++j) {
      const std::size_t src = std::min(base + j, n - 1);
      thr[j] = lanes.throttle[src];
      brk[j] = lanes.brake_accel[src];
      flag[j] = lanes.brake_flag[src];
    }
    const __m256d throttle = _mm256_loadu_pd(thr.data());
    const __m256d brake = _mm256_loadu_pd(brk.data());
    const __m256d is_brake = _mm256_cmp_pd(_mm256_loadu_pd(flag.data()), half, _CMP_GT_OQ);
    const __m256d throttle_k = _mm256_mul_pd(c.power_k, throttle);

    __m256d x = _mm256_set1_pd(spec.x0);
    __m256d v = _mm256_set1_pd(spec.v0);
    __m256d fuel = zero;
    __m256d steps = zero;
    __m256d reached = zero;
    __m256d active = all_ones;
    __m256d blocked = zero;

    for (int k = 0; k < spec.max_steps; ++k) {
      const __m256d hit = _mm256_and_pd(active, _mm256_cmp_pd(x, target, _CMP_GE_OQ));
      reached = _mm256_or_pd(reached, hit);
      active = _mm256_andnot_pd(hit, active);
      if (!any(active)) break;

      const __m256d vk = _mm256_mul_pd(c.kmh, v);
      const __m256d r = resistance4(c, vk);
      const __m256d vk_eff = _mm256_max_pd(vk, c.floor_kmh);
      const __m256d f = _mm256_min_pd(_mm256_div_pd(throttle_k, vk_eff), c.tire_limit);
      const __m256d a_thr = _mm256_div_pd(_mm256_sub_pd(f, r), c.mass);
      const __m256d a = _mm256_blendv_pd(a_thr, brake, is_brake);

      __m256d v1 = _mm256_add_pd(v, _mm256_mul_pd(a, dt));
      const __m256d over = _mm256_cmp_pd(v1, cap, _CMP_GT_OQ);
      const __m256d under = _mm256_andnot_pd(over, _mm256_cmp_pd(v1, zero, _CMP_LT_OQ));
      __m256d a_used = _mm256_blendv_pd(a, _mm256_div_pd(_mm256_sub_pd(cap, v), dt), over);
      a_used = _mm256_blendv_pd(a_used, _mm256_div_pd(_mm256_sub_pd(zero, v), dt), under);
      v1 = _mm256_blendv_pd(v1, cap, over);
      v1 = _mm256_blendv_pd(v1, zero, under);

      const __m256d p = power4(c, vk, a_used, r);
      const __m256d fuel_new = _mm256_add_pd(fuel, _mm256_mul_pd(fuel_rate4(c, p), dt));
      const __m256d x_new = _mm256_add_pd(x, _mm256_mul_pd(_mm256_mul_pd(_mm256_add_pd(v, v1), half), dt));

      fuel = _mm256_blendv_pd(fuel, fuel_new, active);
      x = _mm256_blendv_pd(x, x_new, active);
      v = _mm256_blendv_pd(v, v1, active);
      steps = _mm256_add_pd(steps, _mm256_and_pd(active, one));
      if (k + 1 < spec.max_steps) {
        const __m256d in_zone = _mm256_cmp_pd(_mm256_sub_pd(zone_bar, x),
                                              _mm256_div_pd(_mm256_mul_pd(v, v), zone_div), _CMP_LE_OQ);
        blocked = _mm256_or_pd(blocked, _mm256_and_pd(active, in_zone));
      }

      const __m256d stalled = _mm256_and_pd(
          _mm256_and_pd(active, stall_enabled),
          _mm256_and_pd(_mm256_cmp_pd(v, zero, _CMP_EQ_OQ), _mm256_cmp_pd(a, zero, _CMP_LE_OQ)));
      active = _mm256_andnot_pd(stalled, active);
    }
    reached = _mm256_or_pd(reached, _mm256_cmp_pd(x, target, _CMP_GE_OQ));

    std::array<double, 4> xs{}, vs{}, fs{}, ss{}, rs{}, bs{};
    _mm256_storeu_pd(bs.data(), _mm256_and_pd(blocked, one));
    _mm256_storeu_pd(xs.data(), x);
    _mm256_storeu_pd(vs.data(), v);
    _mm256_storeu_pd(fs.data(), fuel);
    _mm256_storeu_pd(ss.data(), steps);
    _mm256_storeu_pd(rs.data(), _mm256_and_pd(reached, one));
    for (std::size_t j = 0; j < 4 && base + j < n; ++j) {
      out.x[base + j] = xs[j];
      out.v[base + j] = vs[j];
      out.fuel[base + j] = fs[j];
      out.steps[base + j] = static_cast<std::int32_t>(ss[j]);
      out.reached[base + j] = rs[j] > 0.5 ? 1 : 0;
      out.clear[base + j] = bs[j] > 0.5 ? 0 : 1;
    }
  }
}

void fuel_rates_avx2(const PhysicsCoeffs& coeffs, std::span<const double> speed,
                     std::span<const double> accel, std::span<double> out) {
  assert(speed.size() == accel.size() && out.size() == speed.size());
  const Coeffs4 c(coeffs);
  const std::size_t n = speed.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vk = _mm256_mul_pd(c.kmh, _mm256_loadu_pd(speed.data() + i));
    const __m256d r = resistance4(c, vk);
    const __m256d p = power4(c, vk, _mm256_loadu_pd(accel.data() + i), r);
    _mm256_storeu_pd(out.data() + i, fuel_rate4(c, p));
  }
  if (i < n) fuel_rates_scalar(coeffs, speed.subspan(i), accel.subspan(i), out.subspan(i));
}

#else

void rollout_avx2(const PhysicsCoeffs&, const RolloutSpec&, const LaneControls&, RolloutLanes&) {
  throw std::runtime_error("AVX2 kernels not compiled for this target");
}

void fuel_rates_avx2(const PhysicsCoeffs&, std::span<const double>, std::span<const double>,
                     std::span<double>) {
  throw std::runtime_error("AVX2 kernels not compiled for this target");
}

#endif

}  // namespace glosa::kernels
