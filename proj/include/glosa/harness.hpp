#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "glosa/baseline.hpp"
#include "glosa/fuel.hpp"
#include "glosa/optimizer.hpp"
#include "glosa/spat.hpp"
#include "glosa/vehicle.hpp"

namespace glosa {

enum class ScenarioKind { Uninformed, Deterministic, Stochastic };
enum class GradeDirection { Downhill, Uphill };

std::string to_string(ScenarioKind kind);
std::string to_string(GradeDirection grade);
std::optional<ScenarioKind> parse_scenario_kind(const std::string& s);
std::optional<GradeDirection> parse_grade(const std::string& s);

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::Deterministic;
  GradeDirection grade = GradeDirection::Downhill;
  double initial_speed_mps = 17.88;
  double ttg_s = 10.0;
  double bias_s = 0.0;
  double sd_s = 0.0;
  /// Stochastic only: when non-empty, replication r uses
  /// error_grid[r % size] instead of (bias_s, sd_s).
  std::vector<std::pair<double, double>> error_grid;
  int replications = 1;
  std::uint64_t seed = 1;

  std::vector<std::string> violations() const;
  std::pair<double, double> error_for(int replication) const;
};

/// Everything a run needs besides the scenario itself.
struct HarnessConfig {
  VehicleParams vehicle = VehicleParams::cadillac_srx_2014();
  OptimizerConfig optimizer;
  BaselineParams baseline;
  double grade_magnitude = 0.03;
  double speed_limit_mps = 17.88;
  double gravity_mps2 = 9.8066;
  unsigned threads = 0;  // 0: hardware concurrency
  bool keep_trajectories = false;

  std::vector<std::string> violations() const;
  RoadParams road(GradeDirection grade) const;
};

/// End-to-end checks on one produced trajectory.
struct TrajectoryAudit {
  bool red_violation = false;       // at the bar or past it before the true switch
  double max_jerk_mps3 = 0.0;       // over steps that are not emergency engagements
  std::size_t forced_steps = 0;
  double min_speed_mps = 0.0;
  double max_speed_mps = 0.0;
  double final_position_m = 0.0;
  bool position_monotone = true;
};

TrajectoryAudit audit_trajectory(const Trajectory& trajectory, const SignalTiming& timing,
                                 const OptimizerConfig& config);

struct Replication {
  double bias_s = 0.0;
  double sd_s = 0.0;
  std::uint64_t seed = 0;
  double fuel_L = 0.0;
  bool completed = true;
  std::string diagnostic;
  TrajectoryAudit audit;
};

struct RunResult {
  ScenarioSpec spec;
  std::vector<Replication> reps;  // one per replication
  double mean_fuel_L = 0.0;
  double sd_fuel_L = 0.0;
  double baseline_fuel_L = 0.0;
  double savings_vs_baseline_pct = 0.0;
  Trajectory baseline;
  std::vector<Trajectory> trajectories;  // filled when keep_trajectories is set

  std::vector<double> fuel_L() const;
  bool all_completed() const;
};

/// splitmix64-based hash of (master, cell, replication).
std::uint64_t replication_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t replication);

/// Runs `count` independent tasks on up to `threads` workers (0: hardware
/// concurrency). Tasks must write only to their own slots.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task);

SignalTiming timing_for(const ScenarioSpec& spec);

/// One replication of a scenario; `seed` feeds the prediction stream.
PlanResult run_replication(const ScenarioSpec& spec, double bias_s, double sd_s, std::uint64_t seed,
                           const HarnessConfig& config);

/// Runs every replication of one scenario. `cell_index` enters the seeds.
/// Throws std::invalid_argument for an invalid spec.
RunResult run_scenario(const ScenarioSpec& spec, const HarnessConfig& config, std::uint64_t cell_index = 0);

/// Runs several scenarios, parallel over all replications of all cells.
std::vector<RunResult> run_scenarios(const std::vector<ScenarioSpec>& specs, const HarnessConfig& config);

/// The 2 grades x 4 TTG x {Uninformed, Deterministic, Stochastic} matrix.
/// Stochastic cells cycle through `error_grid` over `stochastic_reps`.
std::vector<ScenarioSpec> scenario_matrix(double initial_speed_mps, int stochastic_reps,
                                          const std::vector<std::pair<double, double>>& error_grid,
                                          std::uint64_t seed, const std::vector<double>& ttgs = {10, 15, 20, 25});

struct SweepGrid {
  std::vector<double> biases = {0.0, 0.4, 0.8, 1.6, 2.4, 4.0, 6.0, 8.0};
  std::vector<double> sds = {0.0, 0.5, 0.75, 1.25, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0};
  std::vector<double> ttgs = {15.0, 20.0};
  std::vector<GradeDirection> grades = {GradeDirection::Downhill, GradeDirection::Uphill};
  double initial_speed_mps = 17.88;
  int replications = 50;
  std::uint64_t seed = 1;

  std::size_t cell_count() const { return biases.size() * sds.size() * ttgs.size() * grades.size(); }
  std::vector<std::string> violations() const;
};

struct SweepCell {
  GradeDirection grade = GradeDirection::Downhill;
  double ttg_s = 0.0;
  double bias_s = 0.0;
  double sd_s = 0.0;
  RunResult result;
};

/// Cross product grade x TTG x bias x sd (sd fastest).
std::vector<SweepCell> sensitivity_sweep(const SweepGrid& grid, const HarnessConfig& config);

struct ProportionCell {
  GradeDirection grade = GradeDirection::Downhill;
  double ttg_s = 0.0;
  double bias_s = 0.0;
  double sd_s = 0.0;
  std::optional<double> proportion;  // empty when deterministic equals baseline
};

/// (baseline - stochastic) / (baseline - deterministic) per sweep cell, using
/// the deterministic and baseline fuel of the same grade and TTG.
std::vector<ProportionCell> savings_proportion_surface(const std::vector<SweepCell>& sweep,
                                                       const HarnessConfig& config);

}  // namespace glosa
