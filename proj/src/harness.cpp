#include "glosa/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace glosa {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Mean that returns the common value exactly when all samples agree.
double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); })) return xs.front();
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sd_of(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

VehicleState initial_state(const ScenarioSpec& spec, const HarnessConfig& config, const RoadParams& road) {
  VehicleState s;
  s.speed_mps = std::min(spec.initial_speed_mps, road.speed_limit_mps);
  s.control = control_for_accel(0.0, s.speed_mps, config.vehicle, road, config.optimizer.max_brake_mps2);
  return s;
}

// The exit target is the road's free-flow speed, independent of the approach
// speed: a slow approach still aims to leave at the limit.
OptimizerConfig optimizer_for(const ScenarioSpec&, const HarnessConfig& config) { return config.optimizer; }

int total_reps(const ScenarioSpec& spec) {
  return spec.kind == ScenarioKind::Stochastic ? spec.replications : 1;
}

void finalize(RunResult& r, const HarnessConfig& config) {
  const std::vector<double> fuel = r.fuel_L();
  r.mean_fuel_L = mean_of(fuel);
  r.sd_fuel_L = sd_of(fuel, r.mean_fuel_L);
  const RoadParams road = config.road(r.spec.grade);
  r.baseline_fuel_L = trajectory_fuel(r.baseline, config.vehicle, road);
  r.savings_vs_baseline_pct = 100.0 * (r.baseline_fuel_L - r.mean_fuel_L) / r.baseline_fuel_L;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Uninformed:
      return "uninformed";
    case ScenarioKind::Deterministic:
      return "deterministic";
    case ScenarioKind::Stochastic:
      return "stochastic";
  }
  return "?";
}

std::string to_string(GradeDirection grade) { return grade == GradeDirection::Downhill ? "downhill" : "uphill"; }

std::optional<ScenarioKind> parse_scenario_kind(const std::string& s) {
  if (s == "uninformed" || s == "baseline" || s == "base") return ScenarioKind::Uninformed;
  if (s == "deterministic" || s == "det") return ScenarioKind::Deterministic;
  if (s == "stochastic" || s == "stoch") return ScenarioKind::Stochastic;
  return std::nullopt;
}

std::optional<GradeDirection> parse_grade(const std::string& s) {
  if (s == "down" || s == "downhill") return GradeDirection::Downhill;
  if (s == "up" || s == "uphill") return GradeDirection::Uphill;
  return std::nullopt;
}

std::vector<std::string> ScenarioSpec::violations() const {
  std::vector<std::string> out;
  if (replications < 1) out.emplace_back("ScenarioSpec.replications >= 1");
  if (!(initial_speed_mps > 0.0)) out.emplace_back("ScenarioSpec.initial_speed_mps > 0");
  if (!(ttg_s >= 0.0)) out.emplace_back("SignalTiming.true_switch_time_s >= 0");
  if (kind != ScenarioKind::Stochastic && (bias_s != 0.0 || sd_s != 0.0 || !error_grid.empty())) {
    out.emplace_back("ScenarioSpec.bias_s = sd_s = 0 unless stochastic");
  }
  auto check = [&](double bias, double sd) {
    PredictionModel m;
    m.bias_s = bias;
    m.sd_s = sd;
    for (auto& v : m.violations()) out.push_back(v);
  };
  check(bias_s, sd_s);
  for (const auto& [b, s] : error_grid) check(b, s);
  return out;
}

std::pair<double, double> ScenarioSpec::error_for(int replication) const {
  if (error_grid.empty()) return {bias_s, sd_s};
  return error_grid[static_cast<std::size_t>(replication) % error_grid.size()];
}

std::vector<std::string> HarnessConfig::violations() const {
  std::vector<std::string> out = vehicle.violations();
  for (auto& v : optimizer.violations()) out.push_back(v);
  for (auto& v : baseline.violations()) out.push_back(v);
  for (auto& v : road(GradeDirection::Uphill).violations()) out.push_back(v);
  return out;
}

RoadParams HarnessConfig::road(GradeDirection grade) const {
  RoadParams r;
  r.grade = grade == GradeDirection::Downhill ? -grade_magnitude : grade_magnitude;
  r.speed_limit_mps = speed_limit_mps;
  r.gravity_mps2 = gravity_mps2;
  return r;
}

TrajectoryAudit audit_trajectory(const Trajectory& trajectory, const SignalTiming& timing,
                                 const OptimizerConfig& config) {
  TrajectoryAudit a;
  if (trajectory.empty()) return a;
  a.min_speed_mps = a.max_speed_mps = trajectory.states.front().speed_mps;
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const VehicleState& s = trajectory.states[k];
    if (timing.is_red(s.time_s) && s.position_m >= config.stop_bar_m()) a.red_violation = true;
    a.min_speed_mps = std::min(a.min_speed_mps, s.speed_mps);
    a.max_speed_mps = std::max(a.max_speed_mps, s.speed_mps);
    if (trajectory.forced_at(k)) ++a.forced_steps;
    if (k == 0) continue;
    const VehicleState& p = trajectory.states[k - 1];
    if (s.position_m < p.position_m) a.position_monotone = false;
    if (!trajectory.forced_at(k)) {
      a.max_jerk_mps3 = std::max(a.max_jerk_mps3, std::abs(s.accel_mps2 - p.accel_mps2) / trajectory.dt_s);
    }
  }
  a.final_position_m = trajectory.back().position_m;
  return a;
}

std::vector<double> RunResult::fuel_L() const {
  std::vector<double> out;
  out.reserve(reps.size());
  for (const auto& r : reps) out.push_back(r.fuel_L);
  return out;
}

bool RunResult::all_completed() const {
  return std::all_of(reps.begin(), reps.end(), [](const Replication& r) { return r.completed; });
}

std::uint64_t replication_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t replication) {
  return splitmix64(splitmix64(splitmix64(master) ^ cell) ^ replication);
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

SignalTiming timing_for(const ScenarioSpec& spec) { return SignalTiming{spec.ttg_s, true}; }

PlanResult run_replication(const ScenarioSpec& spec, double bias_s, double sd_s, std::uint64_t seed,
                           const HarnessConfig& config) {
  const RoadParams road = config.road(spec.grade);
  const OptimizerConfig cfg = optimizer_for(spec, config);
  const SignalTiming timing = timing_for(spec);
  SpatStream stream = SpatStream::deterministic(timing);
  if (spec.kind == ScenarioKind::Stochastic) {
    PredictionModel model;
    model.bias_s = bias_s;
    model.sd_s = sd_s;
    model.rng_seed = seed;
    stream = SpatStream::stochastic(timing, model);
  }
  return plan_trajectory(initial_state(spec, config, road), stream, cfg, config.vehicle, road);
}

namespace {

struct Task {
  std::size_t cell;
  int rep;
};

void run_task(const ScenarioSpec& spec, std::uint64_t cell_index, int rep, const HarnessConfig& config,
              RunResult& result) {
  const RoadParams road = config.road(spec.grade);
  const OptimizerConfig cfg = optimizer_for(spec, config);
  Replication& out = result.reps[static_cast<std::size_t>(rep)];
  if (spec.kind == ScenarioKind::Uninformed) {
    // The baseline trajectory itself, computed in prepare().
    out.fuel_L = trajectory_fuel(result.baseline, config.vehicle, road);
    out.audit = audit_trajectory(result.baseline, timing_for(spec), cfg);
    out.completed = out.audit.final_position_m >= cfg.exit_m();
    if (config.keep_trajectories) result.trajectories[0] = result.baseline;
    return;
  }
  const auto [bias, sd] = spec.kind == ScenarioKind::Stochastic ? spec.error_for(rep) : std::pair{0.0, 0.0};
  out.bias_s = bias;
  out.sd_s = sd;
  out.seed = replication_seed(spec.seed, cell_index, static_cast<std::uint64_t>(rep));
  PlanResult plan = run_replication(spec, bias, sd, out.seed, config);
  out.fuel_L = trajectory_fuel(plan.trajectory, config.vehicle, road);
  out.completed = plan.completed;
  out.diagnostic = plan.diagnostic;
  out.audit = audit_trajectory(plan.trajectory, timing_for(spec), cfg);
  if (config.keep_trajectories) result.trajectories[static_cast<std::size_t>(rep)] = std::move(plan.trajectory);
}

void prepare(RunResult& r, const HarnessConfig& config) {
  const auto problems = r.spec.violations();
  if (!problems.empty()) {
    std::string msg = "invalid scenario:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw std::invalid_argument(msg);
  }
  const int n = total_reps(r.spec);
  r.reps.assign(static_cast<std::size_t>(n), Replication{});
  if (config.keep_trajectories) r.trajectories.assign(static_cast<std::size_t>(n), Trajectory{});
  const RoadParams road = config.road(r.spec.grade);
  r.baseline = baseline_trajectory(timing_for(r.spec), r.spec.initial_speed_mps, config.vehicle, road,
                                   optimizer_for(r.spec, config), config.baseline);
}

}  // namespace

std::vector<RunResult> run_scenarios(const std::vector<ScenarioSpec>& specs, const HarnessConfig& config) {
  std::vector<RunResult> results(specs.size());
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    results[i].spec = specs[i];
    prepare(results[i], config);
    for (int r = 0; r < total_reps(specs[i]); ++r) tasks.push_back({i, r});
  }
  parallel_for(tasks.size(), config.threads, [&](std::size_t t) {
    const Task& task = tasks[t];
    run_task(specs[task.cell], task.cell, task.rep, config, results[task.cell]);
  });
  for (auto& r : results) finalize(r, config);
  return results;
}

RunResult run_scenario(const ScenarioSpec& spec, const HarnessConfig& config, std::uint64_t cell_index) {
  RunResult result;
  result.spec = spec;
  prepare(result, config);
  parallel_for(static_cast<std::size_t>(total_reps(spec)), config.threads,
               [&](std::size_t r) { run_task(spec, cell_index, static_cast<int>(r), config, result); });
  finalize(result, config);
  return result;
}

std::vector<ScenarioSpec> scenario_matrix(double initial_speed_mps, int stochastic_reps,
                                          const std::vector<std::pair<double, double>>& error_grid,
                                          std::uint64_t seed, const std::vector<double>& ttgs) {
  std::vector<ScenarioSpec> out;
  for (GradeDirection g : {GradeDirection::Downhill, GradeDirection::Uphill}) {
    for (double ttg : ttgs) {
      for (ScenarioKind k : {ScenarioKind::Uninformed, ScenarioKind::Deterministic, ScenarioKind::Stochastic}) {
        ScenarioSpec s;
        s.kind = k;
        s.grade = g;
        s.initial_speed_mps = initial_speed_mps;
        s.ttg_s = ttg;
        s.seed = seed;
        if (k == ScenarioKind::Stochastic) {
          s.replications = stochastic_reps;
          s.error_grid = error_grid;
        }
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

std::vector<std::string> SweepGrid::violations() const {
  std::vector<std::string> out;
  if (biases.empty() || sds.empty() || ttgs.empty() || grades.empty()) out.emplace_back("SweepGrid axes non-empty");
  for (double b : biases) {
    if (!(b >= 0.0 && b <= 8.0)) out.push_back("SweepGrid bias " + std::to_string(b) + " within [0, 8]");
  }
  for (double s : sds) {
    if (!(s >= 0.0 && s <= 8.0)) out.push_back("SweepGrid sd " + std::to_string(s) + " within [0, 8]");
  }
  if (replications < 1) out.emplace_back("SweepGrid.replications >= 1");
  return out;
}

std::vector<SweepCell> sensitivity_sweep(const SweepGrid& grid, const HarnessConfig& config) {
  const auto problems = grid.violations();
  if (!problems.empty()) throw std::invalid_argument("invalid sweep grid: " + problems.front());
  std::vector<SweepCell> cells;
  std::vector<ScenarioSpec> specs;
  for (GradeDirection g : grid.grades) {
    for (double ttg : grid.ttgs) {
      for (double bias : grid.biases) {
        for (double sd : grid.sds) {
          ScenarioSpec s;
          s.kind = ScenarioKind::Stochastic;
          s.grade = g;
          s.initial_speed_mps = grid.initial_speed_mps;
          s.ttg_s = ttg;
          s.bias_s = bias;
          s.sd_s = sd;
          s.replications = grid.replications;
          s.seed = grid.seed;
          specs.push_back(s);
          cells.push_back({g, ttg, bias, sd, {}});
        }
      }
    }
  }
  std::vector<RunResult> results = run_scenarios(specs, config);
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i].result = std::move(results[i]);
  return cells;
}

std::vector<ProportionCell> savings_proportion_surface(const std::vector<SweepCell>& sweep,
                                                       const HarnessConfig& config) {
  // Deterministic reference per (grade, TTG, v0).
  std::map<std::tuple<int, double, double>, double> det;
  std::vector<ProportionCell> out;
  out.reserve(sweep.size());
  for (const SweepCell& c : sweep) {
    const auto key = std::tuple{static_cast<int>(c.grade), c.ttg_s, c.result.spec.initial_speed_mps};
    auto it = det.find(key);
    if (it == det.end()) {
      ScenarioSpec s;
      s.kind = ScenarioKind::Deterministic;
      s.grade = c.grade;
      s.ttg_s = c.ttg_s;
      s.initial_speed_mps = c.result.spec.initial_speed_mps;
      it = det.emplace(key, run_scenario(s, config).mean_fuel_L).first;
    }
    ProportionCell p{c.grade, c.ttg_s, c.bias_s, c.sd_s, std::nullopt};
    const double base = c.result.baseline_fuel_L;
    const double max_saving = base - it->second;
    if (std::abs(max_saving) > 1e-12 * base) {
      const double saving = base - c.result.mean_fuel_L;
      p.proportion = saving == max_saving ? 1.0 : saving / max_saving;
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace glosa
