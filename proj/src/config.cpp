#include "glosa/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace glosa {

using nlohmann::json;

namespace {

// Reads known keys out of one JSON object, recording type errors and
// leftover (unknown) keys against a dotted path.
class Section {
 public:
  Section(const json& j, std::string path, std::vector<std::string>& errors)
      : j_(j), path_(std::move(path)), errors_(errors) {
    if (!j_.is_object()) errors_.push_back(path_ + ": expected an object");
  }
  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;
  ~Section() {
    if (!j_.is_object()) return;
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) errors_.push_back(path_ + "." + key + ": unknown key");
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.is_object() || !j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      errors_.push_back(path_ + "." + key + ": wrong type");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    if (!j_.is_object() || !j_.contains(key)) return nullptr;
    return &j_.at(key);
  }

  const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

void read_vehicle(Section s, VehicleParams& v) {
  s.get("mass_kg", v.mass_kg);
  s.get("driveline_efficiency", v.driveline_efficiency);
  s.get("gear_factor", v.gear_factor);
  s.get("max_power_kW", v.max_power_kW);
  s.get("frontal_area_m2", v.frontal_area_m2);
  s.get("drag_coeff", v.drag_coeff);
  s.get("altitude_factor", v.altitude_factor);
  s.get("air_density_kg_m3", v.air_density_kg_m3);
  s.get("rolling_c0", v.rolling_c0);
  s.get("rolling_c1", v.rolling_c1);
  s.get("rolling_c2", v.rolling_c2);
  s.get("tractive_mass_fraction", v.tractive_mass_fraction);
  s.get("friction_coeff", v.friction_coeff);
  s.get("fuel_alpha0", v.fuel_alpha0);
  s.get("fuel_alpha1", v.fuel_alpha1);
  s.get("fuel_alpha2", v.fuel_alpha2);
}

json vehicle_json(const VehicleParams& v) {
  return {{"mass_kg", v.mass_kg},
          {"driveline_efficiency", v.driveline_efficiency},
          {"gear_factor", v.gear_factor},
          {"max_power_kW", v.max_power_kW},
          {"frontal_area_m2", v.frontal_area_m2},
          {"drag_coeff", v.drag_coeff},
          {"altitude_factor", v.altitude_factor},
          {"air_density_kg_m3", v.air_density_kg_m3},
          {"rolling_c0", v.rolling_c0},
          {"rolling_c1", v.rolling_c1},
          {"rolling_c2", v.rolling_c2},
          {"tractive_mass_fraction", v.tractive_mass_fraction},
          {"friction_coeff", v.friction_coeff},
          {"fuel_alpha0", v.fuel_alpha0},
          {"fuel_alpha1", v.fuel_alpha1},
          {"fuel_alpha2", v.fuel_alpha2}};
}

void read_optimizer(Section s, OptimizerConfig& o) {
  s.get("dt_s", o.dt_s);
  s.get("throttle_grid", o.throttle_grid);
  s.get("brake_grid", o.brake_grid);
  s.get("jerk_limit_mps3", o.jerk_limit_mps3);
  s.get("max_brake_mps2", o.max_brake_mps2);
  s.get("upstream_length_m", o.upstream_length_m);
  s.get("downstream_length_m", o.downstream_length_m);
  s.get("step_cap", o.step_cap);
  s.get("rollout_step_cap", o.rollout_step_cap);
  s.get("desired_exit_speed_mps", o.desired_exit_speed_mps);
  s.get("exit_speed_tolerance_mps", o.exit_speed_tolerance_mps);
  s.get("stop_margin_m", o.stop_margin_m);
}

json optimizer_json(const OptimizerConfig& o) {
  return {{"dt_s", o.dt_s},
          {"throttle_grid", o.throttle_grid},
          {"brake_grid", o.brake_grid},
          {"jerk_limit_mps3", o.jerk_limit_mps3},
          {"max_brake_mps2", o.max_brake_mps2},
          {"upstream_length_m", o.upstream_length_m},
          {"downstream_length_m", o.downstream_length_m},
          {"step_cap", o.step_cap},
          {"rollout_step_cap", o.rollout_step_cap},
          {"desired_exit_speed_mps", o.desired_exit_speed_mps},
          {"exit_speed_tolerance_mps", o.exit_speed_tolerance_mps},
          {"stop_margin_m", o.stop_margin_m}};
}

template <typename Enum, typename Parse>
void read_enum(Section& s, const char* key, Enum& out, Parse parse) {
  std::string text;
  const json* j = s.child(key);
  if (!j) return;
  if (!j->is_string()) {
    s.get(key, text);  // records the type error
    return;
  }
  if (auto v = parse(j->get<std::string>())) {
    out = *v;
  } else {
    throw std::invalid_argument(s.path() + "." + key + ": unrecognised value '" + j->get<std::string>() + "'");
  }
}

ScenarioSpec read_scenario(const json& j, const std::string& path, std::vector<std::string>& errors,
                           std::uint64_t seed) {
  ScenarioSpec spec;
  spec.seed = seed;
  Section s(j, path, errors);
  try {
    read_enum(s, "kind", spec.kind, parse_scenario_kind);
    read_enum(s, "grade", spec.grade, parse_grade);
  } catch (const std::invalid_argument& e) {
    errors.push_back(e.what());
  }
  s.get("initial_speed_mps", spec.initial_speed_mps);
  s.get("ttg_s", spec.ttg_s);
  s.get("bias_s", spec.bias_s);
  s.get("sd_s", spec.sd_s);
  s.get("error_grid", spec.error_grid);
  s.get("replications", spec.replications);
  s.get("seed", spec.seed);
  return spec;
}

json scenario_json(const ScenarioSpec& s) {
  json j = {{"kind", to_string(s.kind)},
            {"grade", to_string(s.grade)},
            {"initial_speed_mps", s.initial_speed_mps},
            {"ttg_s", s.ttg_s},
            {"bias_s", s.bias_s},
            {"sd_s", s.sd_s},
            {"replications", s.replications},
            {"seed", s.seed}};
  if (!s.error_grid.empty()) j["error_grid"] = s.error_grid;
  return j;
}

void read_sweep(Section s, SweepGrid& g, std::vector<std::string>& errors) {
  s.get("biases", g.biases);
  s.get("sds", g.sds);
  s.get("ttgs", g.ttgs);
  std::vector<std::string> grades;
  s.get("grades", grades);
  if (!grades.empty()) {
    g.grades.clear();
    for (const auto& name : grades) {
      if (auto v = parse_grade(name)) {
        g.grades.push_back(*v);
      } else {
        errors.push_back(s.path() + ".grades: unrecognised value '" + name + "'");
      }
    }
  }
  s.get("initial_speed_mps", g.initial_speed_mps);
  s.get("replications", g.replications);
}

json sweep_json(const SweepGrid& g) {
  json grades = json::array();
  for (auto d : g.grades) grades.push_back(to_string(d));
  return {{"biases", g.biases},         {"sds", g.sds},
          {"ttgs", g.ttgs},             {"grades", grades},
          {"initial_speed_mps", g.initial_speed_mps}, {"replications", g.replications}};
}

}  // namespace

std::vector<std::pair<double, double>> MatrixSpec::default_error_grid() {
  std::vector<std::pair<double, double>> out;
  for (double b : {0.0, 2.0, 4.0, 8.0}) {
    for (double s : {0.0, 2.0, 4.0, 8.0}) out.emplace_back(b, s);
  }
  return out;
}

std::vector<std::string> ExperimentConfig::violations() const {
  std::vector<std::string> out = harness.violations();
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    for (auto& v : scenarios[i].violations()) out.push_back("scenarios[" + std::to_string(i) + "]: " + v);
  }
  if (scenarios.empty()) {
    if (matrix.stochastic_reps < 1) out.emplace_back("matrix.stochastic_reps >= 1");
    if (matrix.ttgs.empty()) out.emplace_back("matrix.ttgs non-empty");
    for (double t : matrix.ttgs) {
      if (!(t >= 0.0)) out.emplace_back("SignalTiming.true_switch_time_s >= 0");
    }
    for (const auto& [b, s] : matrix.error_grid) {
      PredictionModel m;
      m.bias_s = b;
      m.sd_s = s;
      for (auto& v : m.violations()) out.push_back("matrix.error_grid: " + v);
    }
  }
  if (sweep) {
    for (auto& v : sweep->violations()) out.push_back("sweep: " + v);
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path dir = fs::absolute(output_dir, ec);
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec)) out.push_back("output_dir " + output_dir + " is not a directory");
  } else if (!fs::exists(dir.parent_path(), ec)) {
    out.push_back("output_dir parent " + dir.parent_path().string() + " does not exist");
  }
  return out;
}

LoadResult load_config_text(const std::string& text) {
  LoadResult r;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    r.errors.push_back(std::string("config: invalid JSON: ") + e.what());
    return r;
  }
  ExperimentConfig& c = r.config;
  Section root(j, "config", r.errors);
  if (const json* v = root.child("vehicle")) read_vehicle(Section(*v, "vehicle", r.errors), c.harness.vehicle);
  if (const json* o = root.child("optimizer")) read_optimizer(Section(*o, "optimizer", r.errors), c.harness.optimizer);
  if (const json* b = root.child("baseline")) {
    Section s(*b, "baseline", r.errors);
    s.get("comfort_decel_mps2", c.harness.baseline.comfort_decel_mps2);
    s.get("accel_throttle", c.harness.baseline.accel_throttle);
    s.get("reaction_time_s", c.harness.baseline.reaction_time_s);
    s.get("stop_short_m", c.harness.baseline.stop_short_m);
  }
  if (const json* rd = root.child("road")) {
    Section s(*rd, "road", r.errors);
    s.get("grade_magnitude", c.harness.grade_magnitude);
    s.get("speed_limit_mps", c.harness.speed_limit_mps);
    s.get("gravity_mps2", c.harness.gravity_mps2);
  }
  if (const json* e = root.child("experiment")) {
    Section s(*e, "experiment", r.errors);
    s.get("seed", c.seed);
    s.get("output_dir", c.output_dir);
    s.get("plots", c.plots);
    s.get("verbose", c.verbose);
    s.get("threads", c.harness.threads);
    if (const json* m = s.child("matrix")) {
      Section ms(*m, "experiment.matrix", r.errors);
      ms.get("initial_speed_mps", c.matrix.initial_speed_mps);
      ms.get("ttgs", c.matrix.ttgs);
      ms.get("stochastic_reps", c.matrix.stochastic_reps);
      ms.get("error_grid", c.matrix.error_grid);
    }
    if (const json* list = s.child("scenarios")) {
      if (!list->is_array()) {
        r.errors.emplace_back("experiment.scenarios: expected an array");
      } else {
        for (std::size_t i = 0; i < list->size(); ++i) {
          c.scenarios.push_back(
              read_scenario((*list)[i], "experiment.scenarios[" + std::to_string(i) + "]", r.errors, c.seed));
        }
      }
    }
    if (const json* sw = s.child("sweep")) {
      if (!sw->is_null()) {
        SweepGrid g;
        g.seed = c.seed;
        read_sweep(Section(*sw, "experiment.sweep", r.errors), g, r.errors);
        c.sweep = g;
      }
    }
  }
  return r;
}

LoadResult load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    LoadResult r;
    r.errors.push_back("config: cannot open " + path);
    return r;
  }
  std::ostringstream text;
  text << in.rdbuf();
  return load_config_text(text.str());
}

std::string to_json(const ExperimentConfig& c) {
  json scenarios = json::array();
  for (const auto& s : c.scenarios) scenarios.push_back(scenario_json(s));
  json j = {{"vehicle", vehicle_json(c.harness.vehicle)},
            {"optimizer", optimizer_json(c.harness.optimizer)},
            {"baseline",
             {{"comfort_decel_mps2", c.harness.baseline.comfort_decel_mps2},
              {"accel_throttle", c.harness.baseline.accel_throttle},
              {"reaction_time_s", c.harness.baseline.reaction_time_s},
              {"stop_short_m", c.harness.baseline.stop_short_m}}},
            {"road",
             {{"grade_magnitude", c.harness.grade_magnitude},
              {"speed_limit_mps", c.harness.speed_limit_mps},
              {"gravity_mps2", c.harness.gravity_mps2}}},
            {"experiment",
             {{"seed", c.seed},
              {"output_dir", c.output_dir},
              {"plots", c.plots},
              {"verbose", c.verbose},
              {"threads", c.harness.threads},
              {"matrix",
               {{"initial_speed_mps", c.matrix.initial_speed_mps},
                {"ttgs", c.matrix.ttgs},
                {"stochastic_reps", c.matrix.stochastic_reps},
                {"error_grid", c.matrix.error_grid}}},
              {"scenarios", scenarios},
              {"sweep", c.sweep ? sweep_json(*c.sweep) : json(nullptr)}}}};
  return j.dump(2) + "\n";
}

}  // namespace glosa
