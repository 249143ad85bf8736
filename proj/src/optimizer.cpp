#include "glosa/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "glosa/kernels.hpp"
#include "glosa/physics.hpp"

namespace glosa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-9;

struct Scratch {
  kernels::LaneControls lanes;
  kernels::RolloutLanes out;
  kernels::LaneControls down_lanes;
  kernels::RolloutLanes down_out;
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

bool costs_tie(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) return a == b;
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

double exit_speed_target(const OptimizerConfig& cfg, const RoadParams& road) {
  return std::min(cfg.desired_exit_speed_mps, road.speed_limit_mps);
}

// Litres charged per kJ of kinetic energy still missing at the exit. Far
// above any real fuel-per-energy rate, so a faster exit always wins and
// fuel only decides between roll-outs with the same shortfall.
constexpr double kShortfallLpkJ = 1.0;

// Downstream roll-outs for every lane in `lanes` from (x, v). Returns the
// cost of each lane (+inf when the exit is not reached) and whether it
// reached the exit speed.
void downstream_lane_costs(const PhysicsCoeffs& c, double x, double v, const kernels::LaneControls& lanes,
                           kernels::RolloutLanes& out, const OptimizerConfig& cfg, const RoadParams& road,
                           std::vector<double>& cost, std::vector<std::uint8_t>& at_speed) {
  kernels::RolloutSpec spec;
  spec.x0 = x;
  spec.v0 = v;
  spec.dt = cfg.dt_s;
  spec.v_cap = exit_speed_target(cfg, road);
  spec.x_target = cfg.exit_m();
  spec.max_steps = cfg.rollout_step_cap;
  spec.stop_on_stall = true;
  kernels::rollout(c, spec, lanes, out);

  const double target = spec.v_cap;
  cost.assign(lanes.size(), kInf);
  at_speed.assign(lanes.size(), 0);
  for (std::size_t j = 0; j < lanes.size(); ++j) {
    if (!out.reached[j]) continue;
    const double ve = out.v[j];
    if (ve >= target - cfg.exit_speed_tolerance_mps) {
      at_speed[j] = 1;
      cost[j] = out.fuel[j];
    } else {
      const double missing_kj = 0.5 * c.inertia_mass * (target * target - ve * ve) / 1000.0;
      cost[j] = out.fuel[j] + kShortfallLpkJ * missing_kj;
    }
  }
}

// Lanes that reach the exit speed dominate lanes that do not.
double preferred_min(const std::vector<double>& cost, const std::vector<std::uint8_t>& at_speed) {
  double best_fast = kInf;
  double best_any = kInf;
  for (std::size_t j = 0; j < cost.size(); ++j) {
    if (at_speed[j]) best_fast = std::min(best_fast, cost[j]);
    best_any = std::min(best_any, cost[j]);
  }
  return std::isfinite(best_fast) ? best_fast : best_any;
}

double downstream_best(const PhysicsCoeffs& c, double x, double v, const OptimizerConfig& cfg,
                       const VehicleParams& vehicle, const RoadParams& road) {
  auto& s = scratch();
  s.down_lanes.clear();
  for (double f : cfg.throttle_grid) s.down_lanes.push(Control::throttle(f));
  s.down_lanes.push(control_for_accel(0.0, v, vehicle, road, cfg.max_brake_mps2));
  thread_local std::vector<double> cost;
  thread_local std::vector<std::uint8_t> at_speed;
  downstream_lane_costs(c, x, v, s.down_lanes, s.down_out, cfg, road, cost, at_speed);
  return preferred_min(cost, at_speed);
}

// Index of the preferred candidate among `cost`, breaking ties toward the
// smallest acceleration change, then the lower acceleration.
std::size_t pick(const std::vector<Candidate>& cands, const std::vector<double>& cost, double current_accel) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < cands.size(); ++i) {
    const double ci = cost[i];
    const double cb = cost[best];
    if (costs_tie(ci, cb)) {
      const double di = std::abs(cands[i].commanded_accel_mps2 - current_accel);
      const double db = std::abs(cands[best].commanded_accel_mps2 - current_accel);
      if (di < db || (di == db && cands[i].commanded_accel_mps2 < cands[best].commanded_accel_mps2)) best = i;
    } else if (ci < cb) {
      best = i;
    }
  }
  return best;
}

}  // namespace

std::vector<std::string> OptimizerConfig::violations() const {
  std::vector<std::string> out;
  if (!(dt_s > 0.0)) out.emplace_back("OptimizerConfig.dt_s > 0");
  if (!(jerk_limit_mps3 > 0.0)) out.emplace_back("OptimizerConfig.jerk_limit_mps3 > 0");
  if (!(max_brake_mps2 < 0.0)) out.emplace_back("OptimizerConfig.max_brake_mps2 < 0");
  if (throttle_grid.empty()) out.emplace_back("OptimizerConfig.throttle_grid non-empty");
  if (brake_grid.empty()) out.emplace_back("OptimizerConfig.brake_grid non-empty");
  for (double f : throttle_grid) {
    if (!control_in_bounds(Control::throttle(f), max_brake_mps2)) {
      out.push_back("Control bounds: throttle level " + std::to_string(f) + " outside [0, 1]");
    }
  }
  for (double b : brake_grid) {
    if (!control_in_bounds(Control::brake(b), max_brake_mps2)) {
      out.push_back("Control bounds: brake level " + std::to_string(b) + " outside [max_brake, 0]");
    }
  }
  if (!(upstream_length_m > 0.0)) out.emplace_back("OptimizerConfig.upstream_length_m > 0");
  if (!(downstream_length_m > 0.0)) out.emplace_back("OptimizerConfig.downstream_length_m > 0");
  if (!(desired_exit_speed_mps > 0.0)) out.emplace_back("OptimizerConfig.desired_exit_speed_mps > 0");
  if (step_cap < 1) out.emplace_back("OptimizerConfig.step_cap >= 1");
  if (rollout_step_cap < 1) out.emplace_back("OptimizerConfig.rollout_step_cap >= 1");
  if (!(stop_margin_m >= 0.0)) out.emplace_back("OptimizerConfig.stop_margin_m >= 0");
  return out;
}

double critical_stopping_distance(double speed_mps, double max_brake_mps2) {
  return speed_mps * speed_mps / (2.0 * std::abs(max_brake_mps2));
}

double discrete_braking_distance(double speed_mps, double max_brake_mps2, double dt_s) {
  double v = speed_mps;
  double d = 0.0;
  while (v > 0.0) {
    const double v1 = std::max(0.0, v + max_brake_mps2 * dt_s);
    d += (v + v1) * 0.5 * dt_s;
    v = v1;
  }
  return d;
}

double speed_shed_to_zero_accel(double accel_mps2, double jerk_step, double dt_s) {
  double shed = 0.0;
  for (double a = accel_mps2 + jerk_step; a < 0.0; a += jerk_step) shed -= a * dt_s;
  return shed;
}

namespace {

double speed_gain_to_zero_accel(double accel_mps2, double jerk_step, double dt_s) {
  double gain = 0.0;
  for (double a = accel_mps2 - jerk_step; a > 0.0; a -= jerk_step) gain += a * dt_s;
  return gain;
}

}  // namespace

double assumed_red_until(const SpatSample& spat) {
  // A spread-free prediction is the true switch time shifted by the bias.
  if (spat.sd_s == 0.0) return spat.predicted_switch_time_s - spat.bias_s;
  return kInf;
}

double comfort_stop_accel(double speed_mps, double accel_mps2, const OptimizerConfig& config) {
  const double js = config.jerk_step();
  const double dt = config.dt_s;
  const double lower = std::max(accel_mps2 - js, config.max_brake_mps2);
  const double upper = std::min(accel_mps2 + js, std::max(lower, 0.0));
  // Come to rest this step when the realized deceleration is gentle enough
  // to be followed by standing still.
  const double stop = -speed_mps / dt;
  if (speed_mps > 0.0 && stop >= -js && stop >= accel_mps2 - js - kEps) return stop * (1.0 + 1e-12);
  for (double a : {lower, std::clamp(accel_mps2, lower, upper), upper}) {
    if (std::abs(a) < 1e-12) a = 0.0;
    if (a >= 0.0 || speed_mps + a * dt + kEps >= speed_shed_to_zero_accel(a, js, dt)) return a;
  }
  return upper;
}

bool stop_envelope_clear(const VehicleState& state, double red_until_s, const OptimizerConfig& config) {
  const double bar = config.stop_bar_m();
  const double dt = config.dt_s;
  double t = state.time_s;
  double x = state.position_m;
  double v = state.speed_mps;
  double a = state.accel_mps2;
  for (int k = 0; k < config.rollout_step_cap; ++k) {
    if (t >= red_until_s) return true;
    if (bar - x + kEps < critical_stopping_distance(v, config.max_brake_mps2) + config.stop_margin_m) return false;
    if (v == 0.0 && a >= 0.0) return true;
    a = comfort_stop_accel(v, a, config);
    double v1 = v + a * dt;
    if (v1 <= 0.0) {
      v1 = 0.0;
      a = 0.0;  // at rest the next step holds
    }
    x += (v + v1) * 0.5 * dt;
    v = v1;
    t += dt;
  }
  return false;
}

std::optional<Control> risk_check(const PlanState& state, const OptimizerConfig& config) {
  const double v = state.vehicle.speed_mps;
  if (v <= 0.0) return std::nullopt;
  const double remaining = config.stop_bar_m() - state.vehicle.position_m;
  if (remaining <= critical_stopping_distance(v, config.max_brake_mps2)) {
    return Control::brake(config.max_brake_mps2);
  }
  return std::nullopt;
}

std::vector<Candidate> admissible_controls(const PlanState& state, const OptimizerConfig& config,
                                           const VehicleParams& vehicle, const RoadParams& road, bool red) {
  const VehicleState& s = state.vehicle;
  const double dt = config.dt_s;
  const double js = config.jerk_step();
  const double a0 = s.accel_mps2;
  const double vlim = road.speed_limit_mps;

  std::vector<Control> raw;
  raw.reserve(config.throttle_grid.size() + config.brake_grid.size() + 3);
  for (double f : config.throttle_grid) raw.push_back(Control::throttle(f));
  for (double b : config.brake_grid) raw.push_back(Control::brake(b));
  raw.push_back(control_for_accel(0.0, s.speed_mps, vehicle, road, config.max_brake_mps2));
  raw.push_back(control_for_accel(a0 - js, s.speed_mps, vehicle, road, config.max_brake_mps2));
  raw.push_back(control_for_accel(a0 + js, s.speed_mps, vehicle, road, config.max_brake_mps2));
  const double red_until = red ? assumed_red_until(state.last_spat) : -kInf;
  if (red) {
    raw.push_back(control_for_accel(comfort_stop_accel(s.speed_mps, a0, config), s.speed_mps, vehicle, road,
                                    config.max_brake_mps2));
  }

  struct Scored {
    Candidate cand;
    bool jerk, speed, comfort;
    double jerk_excess;
  };
  std::vector<Scored> safe;
  for (const Control& c : raw) {
    if (std::any_of(safe.begin(), safe.end(), [&](const Scored& x) { return x.cand.control == c; })) continue;
    Candidate cand{c, step_dynamics(s, c, dt, vehicle, road), commanded_accel(c, s.speed_mps, vehicle, road)};
    const VehicleState& n = cand.next;
    if (red && !stop_envelope_clear(n, red_until, config)) continue;
    const double dj = std::abs(n.accel_mps2 - a0);
    bool comfort = true;
    if (n.accel_mps2 < 0.0) {
      comfort = (n.speed_mps == 0.0) ? (-n.accel_mps2 <= js + kEps)
                                     : (n.speed_mps + kEps >= speed_shed_to_zero_accel(n.accel_mps2, js, dt));
    } else if (n.accel_mps2 > 0.0) {
      comfort = vlim - n.speed_mps + kEps >= speed_gain_to_zero_accel(n.accel_mps2, js, dt);
    }
    safe.push_back({cand, dj <= js + kEps, s.speed_mps + cand.commanded_accel_mps2 * dt <= vlim + kEps, comfort,
                    std::max(0.0, dj - js)});
  }

  auto collect = [&](auto pred) {
    std::vector<Candidate> out;
    for (const auto& x : safe) {
      if (pred(x)) out.push_back(x.cand);
    }
    return out;
  };
  if (auto t = collect([](const Scored& x) { return x.jerk && x.speed && x.comfort; }); !t.empty()) return t;
  if (auto t = collect([](const Scored& x) { return x.jerk && x.speed; }); !t.empty()) return t;
  if (auto t = collect([](const Scored& x) { return x.jerk; }); !t.empty()) return t;
  if (safe.empty()) return {};
  const double least = std::min_element(safe.begin(), safe.end(), [](const Scored& a, const Scored& b) {
                         return a.jerk_excess < b.jerk_excess;
                       })->jerk_excess;
  return collect([least](const Scored& x) { return x.jerk_excess <= least + kEps; });
}

double best_downstream_cost(double position_m, double speed_mps, const OptimizerConfig& config,
                            const VehicleParams& vehicle, const RoadParams& road) {
  return downstream_best(PhysicsCoeffs::make(vehicle, road), position_m, speed_mps, config, vehicle, road);
}

namespace {

int steps_until(double now, double when, double dt) {
  const double n = std::ceil((when - now) / dt - 1e-9);
  return std::max(1, static_cast<int>(n));
}

// Upstream roll-outs for all candidates at once, then downstream per
// feasible candidate. Fills cost vectors aligned with `cands`.
void upstream_costs(const PhysicsCoeffs& c, const PlanState& state, const std::vector<Candidate>& cands,
                    const SpatSample& spat, const OptimizerConfig& cfg, const VehicleParams& vehicle,
                    const RoadParams& road, std::vector<SectionCost>& out) {
  auto& s = scratch();
  s.lanes.clear();
  for (const auto& cand : cands) s.lanes.push(cand.control);

  kernels::RolloutSpec spec;
  spec.x0 = state.vehicle.position_m;
  spec.v0 = state.vehicle.speed_mps;
  spec.dt = cfg.dt_s;
  spec.v_cap = road.speed_limit_mps;
  spec.x_target = kInf;
  spec.max_steps = steps_until(state.vehicle.time_s, spat.predicted_switch_time_s, cfg.dt_s);
  spec.stop_on_stall = false;
  // Entering the critical stopping distance before the expected switch would
  // trigger the emergency brake, so such policies count as red-light violations.
  spec.zone_bar = cfg.stop_bar_m();
  spec.zone_div = 2.0 * std::abs(cfg.max_brake_mps2);
  kernels::rollout(c, spec, s.lanes, s.out);

  out.assign(cands.size(), SectionCost{});
  // Copy: downstream_best reuses the scratch buffers.
  const std::vector<double> xs = s.out.x;
  const std::vector<double> vs = s.out.v;
  const std::vector<double> fs = s.out.fuel;
  const std::vector<std::uint8_t> clear = s.out.clear;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    out[i].upstream_L = fs[i];
    if (xs[i] > cfg.stop_bar_m() || !clear[i]) continue;
    out[i].downstream_L = downstream_best(c, xs[i], vs[i], cfg, vehicle, road);
    out[i].feasible = std::isfinite(out[i].downstream_L);
  }
}

}  // namespace

SectionCost two_section_cost(const PlanState& state, const Control& upstream_control, const SpatSample& spat,
                             const OptimizerConfig& config, const VehicleParams& vehicle, const RoadParams& road) {
  const std::vector<Candidate> one{{upstream_control, {}, 0.0}};
  std::vector<SectionCost> out;
  upstream_costs(PhysicsCoeffs::make(vehicle, road), state, one, spat, config, vehicle, road, out);
  return out.front();
}

Decision next_control(const PlanState& state, const SpatSample& spat, const OptimizerConfig& config,
                      const VehicleParams& vehicle, const RoadParams& road) {
  const bool red = state.phase == Phase::Upstream;
  const Decision emergency{Control::brake(config.max_brake_mps2), true, 0.0, 0.0};
  if (red) {
    if (auto forced = risk_check(state, config)) return {*forced, true, 0.0, 0.0};
  }
  const std::vector<Candidate> cands = admissible_controls(state, config, vehicle, road, red);
  if (cands.empty()) return emergency;

  const auto c = PhysicsCoeffs::make(vehicle, road);
  const double a_now = state.vehicle.accel_mps2;
  std::vector<double> total(cands.size(), kInf);

  if (red) {
    std::vector<SectionCost> sections;
    upstream_costs(c, state, cands, spat, config, vehicle, road, sections);
    bool any = false;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (sections[i].feasible) {
        total[i] = sections[i].upstream_L + sections[i].downstream_L;
        any = true;
      }
    }
    if (!any) {
      const auto it = std::min_element(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return a.commanded_accel_mps2 < b.commanded_accel_mps2;
      });
      return {it->control, false, 0.0, kInf};
    }
    const std::size_t k = pick(cands, total, a_now);
    return {cands[k].control, false, sections[k].upstream_L, sections[k].downstream_L};
  }

  auto& s = scratch();
  s.lanes.clear();
  for (const auto& cand : cands) s.lanes.push(cand.control);
  std::vector<double> cost;
  std::vector<std::uint8_t> at_speed;
  downstream_lane_costs(c, state.vehicle.position_m, state.vehicle.speed_mps, s.lanes, s.out, config, road, cost,
                        at_speed);
  const bool any_fast = std::any_of(at_speed.begin(), at_speed.end(), [](auto f) { return f != 0; });
  bool any = false;
  for (std::size_t j = 0; j < cands.size(); ++j) {
    if (any_fast && !at_speed[j]) continue;
    if (std::isfinite(cost[j])) {
      total[j] = cost[j];
      any = true;
    }
  }
  if (!any) {
    const auto it = std::max_element(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      return a.commanded_accel_mps2 < b.commanded_accel_mps2;
    });
    return {it->control, false, 0.0, kInf};
  }
  const std::size_t k = pick(cands, total, a_now);
  return {cands[k].control, false, 0.0, total[k]};
}

PlanResult plan_trajectory(const VehicleState& initial, SpatStream& stream, const OptimizerConfig& config,
                           const VehicleParams& vehicle, const RoadParams& road) {
  PlanResult result;
  Trajectory& traj = result.trajectory;
  traj.dt_s = config.dt_s;
  traj.states.push_back(initial);
  traj.info.emplace_back();

  const SignalTiming& timing = stream.timing();
  PlanState ps;
  ps.vehicle = initial;
  ps.phase = timing.is_red(initial.time_s) ? Phase::Upstream : Phase::Downstream;
  if (ps.phase == Phase::Downstream) ps.distance_covered_upstream_m = initial.position_m;

  for (int step = 0; step < config.step_cap; ++step) {
    if (ps.vehicle.position_m >= config.exit_m()) {
      result.completed = true;
      break;
    }
    const double t = ps.vehicle.time_s;
    StepInfo info;
    if (timing.is_red(t)) {
      ps.last_spat = stream.next(t, config.stop_bar_m() - ps.vehicle.position_m);
      info.predicted_switch_s = ps.last_spat.predicted_switch_time_s;
    } else if (ps.phase == Phase::Upstream) {
      ps.phase = Phase::Downstream;
      ps.distance_covered_upstream_m = ps.vehicle.position_m;
    }
    const Decision d = next_control(ps, ps.last_spat, config, vehicle, road);
    info.forced = d.forced;
    info.upstream_cost_L = d.upstream_L;
    info.downstream_cost_L = d.downstream_L;
    ps.vehicle = step_dynamics(ps.vehicle, d.control, config.dt_s, vehicle, road);
    traj.states.push_back(ps.vehicle);
    traj.info.push_back(info);
  }
  if (!result.completed && ps.vehicle.position_m >= config.exit_m()) result.completed = true;
  if (!result.completed) {
    result.diagnostic = "step cap of " + std::to_string(config.step_cap) + " reached at x=" +
                        std::to_string(ps.vehicle.position_m) + " m";
  }
  result.spat_log = stream.log();
  return result;
}

}  // namespace glosa
