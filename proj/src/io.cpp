#include "glosa/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace glosa {

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_num(const std::string& s, std::size_t lineno) {
  if (s.empty()) return std::nan("");
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw std::runtime_error("trajectory csv: bad number '" + s + "' at line " + std::to_string(lineno));
  }
  return v;
}

constexpr const char* kHeader = "run_id,t,x,v,a,control_kind,control_value,fuel_rate,cum_fuel,predicted_ttg";

nlohmann::json result_json(const RunResult& r) {
  nlohmann::json j;
  j["kind"] = to_string(r.spec.kind);
  j["grade"] = to_string(r.spec.grade);
  j["initial_speed_mps"] = r.spec.initial_speed_mps;
  j["ttg_s"] = r.spec.ttg_s;
  j["bias_s"] = r.spec.bias_s;
  j["sd_s"] = r.spec.sd_s;
  if (!r.spec.error_grid.empty()) {
    nlohmann::json grid = nlohmann::json::array();
    for (const auto& [b, s] : r.spec.error_grid) grid.push_back({b, s});
    j["error_grid"] = grid;
  }
  j["replications"] = r.reps.size();
  j["seed"] = r.spec.seed;
  j["mean_fuel_L"] = r.mean_fuel_L;
  j["sd_fuel_L"] = r.sd_fuel_L;
  j["baseline_fuel_L"] = r.baseline_fuel_L;
  j["savings_vs_baseline_pct"] = r.savings_vs_baseline_pct;
  j["all_completed"] = r.all_completed();
  std::size_t violations = 0;
  double max_jerk = 0.0;
  for (const auto& rep : r.reps) {
    violations += rep.audit.red_violation ? 1 : 0;
    max_jerk = std::max(max_jerk, rep.audit.max_jerk_mps3);
  }
  j["red_light_violations"] = violations;
  j["max_jerk_mps3"] = max_jerk;
  return j;
}

}  // namespace

void write_trajectories_csv(std::ostream& os, const std::vector<NamedTrajectory>& runs,
                            const VehicleParams& vehicle) {
  os << kHeader << '\n';
  for (const auto& run : runs) {
    const Trajectory& tr = run.trajectory;
    const std::vector<double> rates = step_fuel_rates(tr, vehicle, run.road);
    double cum = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
      const VehicleState& s = tr.states[k];
      cum += rates[k] * tr.dt_s;
      const double pred = k < tr.info.size() ? tr.info[k].predicted_switch_s : std::nan("");
      os << run.run_id << ',' << num(s.time_s) << ',' << num(s.position_m) << ',' << num(s.speed_mps) << ','
         << num(s.accel_mps2) << ',' << to_string(s.control.kind) << ',' << num(s.control.value) << ','
         << num(rates[k]) << ',' << num(cum) << ',' << num(pred - s.time_s) << '\n';
    }
  }
}

std::vector<ParsedTrajectory> read_trajectories_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kHeader) throw std::runtime_error("trajectory csv: missing header");
  std::vector<ParsedTrajectory> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 10) throw std::runtime_error("trajectory csv: expected 10 fields at line " + std::to_string(lineno));
    if (out.empty() || out.back().run_id != f[0]) {
      out.emplace_back();
      out.back().run_id = f[0];
    }
    ParsedTrajectory& p = out.back();
    VehicleState s;
    s.time_s = parse_num(f[1], lineno);
    s.position_m = parse_num(f[2], lineno);
    s.speed_mps = parse_num(f[3], lineno);
    s.accel_mps2 = parse_num(f[4], lineno);
    if (f[5] == to_string(ControlKind::Throttle)) {
      s.control = Control::throttle(parse_num(f[6], lineno));
    } else if (f[5] == to_string(ControlKind::Brake)) {
      s.control = Control::brake(parse_num(f[6], lineno));
    } else {
      throw std::runtime_error("trajectory csv: unknown control kind '" + f[5] + "' at line " + std::to_string(lineno));
    }
    StepInfo info;
    const double ttg = parse_num(f[9], lineno);
    if (!std::isnan(ttg)) info.predicted_switch_s = s.time_s + ttg;
    p.trajectory.states.push_back(s);
    p.trajectory.info.push_back(info);
    p.fuel_rate.push_back(parse_num(f[7], lineno));
    p.cum_fuel.push_back(parse_num(f[8], lineno));
  }
  for (auto& p : out) {
    const auto& st = p.trajectory.states;
    if (st.size() >= 2) p.trajectory.dt_s = st[1].time_s - st[0].time_s;
  }
  return out;
}

void write_planning_trace_csv(std::ostream& os, const std::vector<NamedTrajectory>& runs) {
  os << "run_id,t,x,v,a,control_kind,control_value,predicted_switch,upstream_cost_L,downstream_cost_L,forced\n";
  for (const auto& run : runs) {
    const Trajectory& tr = run.trajectory;
    for (std::size_t k = 0; k < tr.size(); ++k) {
      const VehicleState& s = tr.states[k];
      const StepInfo info = k < tr.info.size() ? tr.info[k] : StepInfo{};
      os << run.run_id << ',' << num(s.time_s) << ',' << num(s.position_m) << ',' << num(s.speed_mps) << ','
         << num(s.accel_mps2) << ',' << to_string(s.control.kind) << ',' << num(s.control.value) << ','
         << num(info.predicted_switch_s) << ',' << num(info.upstream_cost_L) << ','
         << num(info.downstream_cost_L) << ',' << (info.forced ? 1 : 0) << '\n';
    }
  }
}

void write_replications_csv(std::ostream& os, const std::vector<RunResult>& results) {
  os << "cell,kind,grade,initial_speed_mps,ttg_s,bias_s,sd_s,replication,seed,fuel_L,baseline_fuel_L,"
        "savings_pct,completed,red_violation,max_jerk_mps3\n";
  for (std::size_t c = 0; c < results.size(); ++c) {
    const RunResult& r = results[c];
    for (std::size_t i = 0; i < r.reps.size(); ++i) {
      const Replication& rep = r.reps[i];
      const double savings = 100.0 * (r.baseline_fuel_L - rep.fuel_L) / r.baseline_fuel_L;
      os << c << ',' << to_string(r.spec.kind) << ',' << to_string(r.spec.grade) << ','
         << num(r.spec.initial_speed_mps) << ',' << num(r.spec.ttg_s) << ',' << num(rep.bias_s) << ','
         << num(rep.sd_s) << ',' << i << ',' << rep.seed << ',' << num(rep.fuel_L) << ',' << num(r.baseline_fuel_L)
         << ',' << num(savings) << ',' << (rep.completed ? 1 : 0) << ',' << (rep.audit.red_violation ? 1 : 0)
         << ',' << num(rep.audit.max_jerk_mps3) << '\n';
    }
  }
}

std::string summary_json(const std::vector<RunResult>& cells, const std::vector<SweepCell>& sweep,
                         const std::vector<ProportionCell>& proportions) {
  nlohmann::json j;
  j["cells"] = nlohmann::json::array();
  for (const auto& r : cells) j["cells"].push_back(result_json(r));
  if (!sweep.empty()) {
    j["sweep"] = nlohmann::json::array();
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      nlohmann::json c = result_json(sweep[i].result);
      if (i < proportions.size()) {
        c["savings_proportion"] =
            proportions[i].proportion ? nlohmann::json(*proportions[i].proportion) : nlohmann::json(nullptr);
      }
      j["sweep"].push_back(c);
    }
  }
  return j.dump(2) + "\n";
}

}  // namespace glosa
