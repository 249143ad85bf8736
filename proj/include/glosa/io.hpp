#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "glosa/fuel.hpp"
#include "glosa/harness.hpp"

namespace glosa {

struct NamedTrajectory {
  std::string run_id;
  Trajectory trajectory;
  RoadParams road;  // for the fuel columns
};

/// Columns: run_id,t,x,v,a,control_kind,control_value,fuel_rate,cum_fuel,predicted_ttg.
/// Numbers are written with 17 significant digits so a parse restores the
/// states bit for bit. predicted_ttg is the received prediction minus t
/// (empty when none was received).
void write_trajectories_csv(std::ostream& os, const std::vector<NamedTrajectory>& runs,
                            const VehicleParams& vehicle);

struct ParsedTrajectory {
  std::string run_id;
  Trajectory trajectory;
  std::vector<double> fuel_rate;
  std::vector<double> cum_fuel;
};

/// Inverse of write_trajectories_csv; dt is recovered from the time column.
/// Throws std::runtime_error naming the offending line.
std::vector<ParsedTrajectory> read_trajectories_csv(std::istream& is);

/// Per-step planner trace: state, control, received prediction and the
/// upstream/downstream costs of the chosen control.
void write_planning_trace_csv(std::ostream& os, const std::vector<NamedTrajectory>& runs);

/// One row per replication of every result.
void write_replications_csv(std::ostream& os, const std::vector<RunResult>& results);

/// Per-cell means, savings and (optionally) savings proportions, as JSON text.
std::string summary_json(const std::vector<RunResult>& cells, const std::vector<SweepCell>& sweep,
                         const std::vector<ProportionCell>& proportions);

}  // namespace glosa
