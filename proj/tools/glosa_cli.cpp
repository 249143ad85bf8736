// glosa: run GLOSA experiments and export trajectories, summaries and figures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "glosa/config.hpp"
#include "glosa/harness.hpp"
#include "glosa/io.hpp"
#include "glosa/svg.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace glosa;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct ConfigError : std::runtime_error {
  std::vector<std::string> messages;
  explicit ConfigError(std::vector<std::string> m) : std::runtime_error("config"), messages(std::move(m)) {}
};

void error_record(const std::string& kind, const std::vector<std::string>& messages) {
  json j = {{"error", kind}, {"messages", messages}};
  std::cerr << j.dump() << '\n';
}

struct Options {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::string> scenario, grade, sweep, out;
  std::optional<double> ttg, v0, bias, sd;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
  bool plots = false;
  bool verbose = false;
};

// "a.b.c=value": value is JSON when it parses as JSON, a string otherwise.
void apply_set(json& root, const std::string& assignment, std::vector<std::string>& errors) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    errors.push_back("--set " + assignment + ": expected key.path=value");
    return;
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &root;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (!node->is_object()) {
      errors.push_back("--set " + path + ": " + key + " is not inside a section");
      return;
    }
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

ExperimentConfig resolve(const Options& o) {
  std::vector<std::string> errors;
  json root = json::object();
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw ConfigError({"config: cannot open " + o.config});
    root = json::parse(in, nullptr, false);
    if (root.is_discarded()) throw ConfigError({"config: invalid JSON in " + o.config});
  }
  for (const auto& s : o.sets) apply_set(root, s, errors);
  if (!errors.empty()) throw ConfigError(errors);
  LoadResult r = load_config_text(root.dump());
  if (!r.errors.empty()) throw ConfigError(r.errors);
  ExperimentConfig c = std::move(r.config);

  if (o.seed) {
    c.seed = *o.seed;
    for (auto& s : c.scenarios) s.seed = *o.seed;
    if (c.sweep) c.sweep->seed = *o.seed;
  }
  if (o.out) c.output_dir = *o.out;
  if (o.plots) c.plots = true;
  if (o.verbose) c.verbose = true;
  if (o.v0) c.matrix.initial_speed_mps = *o.v0;
  if (o.reps) c.matrix.stochastic_reps = *o.reps;

  if (o.scenario) {
    // A single cell built from the flags replaces any listed scenarios.
    ScenarioSpec s;
    const auto kind = parse_scenario_kind(*o.scenario);
    if (!kind) throw ConfigError({"--scenario: expected base, det or stoch, got " + *o.scenario});
    s.kind = *kind;
    if (o.grade) {
      const auto g = parse_grade(*o.grade);
      if (!g) throw ConfigError({"--grade: expected down or up, got " + *o.grade});
      s.grade = *g;
    }
    s.initial_speed_mps = c.matrix.initial_speed_mps;
    s.ttg_s = o.ttg.value_or(10.0);
    s.bias_s = o.bias.value_or(0.0);
    s.sd_s = o.sd.value_or(0.0);
    s.replications = s.kind == ScenarioKind::Stochastic ? o.reps.value_or(c.matrix.stochastic_reps) : 1;
    s.seed = c.seed;
    c.scenarios = {s};
  } else if (o.grade || o.ttg || o.bias || o.sd) {
    throw ConfigError({"--grade, --ttg, --bias and --sd need --scenario"});
  }

  if (o.sweep) {
    if (*o.sweep == "default") {
      if (!c.sweep) {
        c.sweep = SweepGrid{};
        c.sweep->seed = c.seed;
      }
    } else if (*o.sweep != "none") {
      throw ConfigError({"--sweep: expected default or none, got " + *o.sweep});
    } else {
      c.sweep.reset();
    }
  }
  if (c.sweep) {
    if (o.reps) c.sweep->replications = *o.reps;
    if (o.v0) c.sweep->initial_speed_mps = *o.v0;
  }
  return c;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string cell_id(const ScenarioSpec& s) {
  std::string id = to_string(s.kind) + "_" + to_string(s.grade) + "_ttg" + fmt(s.ttg_s);
  if (s.kind == ScenarioKind::Stochastic && s.error_grid.empty()) id += "_b" + fmt(s.bias_s) + "_sd" + fmt(s.sd_s);
  return id;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

template <class F>
void write_stream(const fs::path& path, F&& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  body(out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::string> run_diagnostics(const std::vector<RunResult>& results) {
  std::vector<std::string> out;
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.reps.size(); ++i) {
      if (!r.reps[i].completed) {
        out.push_back(cell_id(r.spec) + " rep " + std::to_string(i) + ": " + r.reps[i].diagnostic);
      }
    }
  }
  return out;
}

int cmd_run(const Options& o) {
  ExperimentConfig c = resolve(o);
  if (auto v = c.violations(); !v.empty()) throw ConfigError(v);

  const fs::path dir = c.output_dir;
  fs::create_directories(dir);
  const auto t0 = std::chrono::steady_clock::now();
  auto log = [&](const std::string& msg) {
    if (!c.verbose) return;
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "[%7.2fs] %s\n", s, msg.c_str());
  };

  std::vector<RunResult> cells;
  std::vector<SweepCell> sweep;
  std::vector<ProportionCell> proportions;
  const bool matrix = c.scenarios.empty() && !c.sweep;
  const std::vector<ScenarioSpec> specs =
      c.scenarios.empty()
          ? (c.sweep ? std::vector<ScenarioSpec>{}
                     : scenario_matrix(c.matrix.initial_speed_mps, c.matrix.stochastic_reps, c.matrix.error_grid,
                                       c.seed, c.matrix.ttgs))
          : c.scenarios;

  HarnessConfig hc = c.harness;
  hc.keep_trajectories = true;
  if (!specs.empty()) {
    log("running " + std::to_string(specs.size()) + " scenario cells");
    cells = run_scenarios(specs, hc);
  }
  if (c.sweep) {
    log("running sweep of " + std::to_string(c.sweep->cell_count()) + " cells x " +
        std::to_string(c.sweep->replications) + " replications");
    HarnessConfig sc = c.harness;
    sc.keep_trajectories = false;
    sweep = sensitivity_sweep(*c.sweep, sc);
    proportions = savings_proportion_surface(sweep, sc);
  }

  // Trajectories: every kept optimizer run plus one baseline per grade/TTG.
  std::vector<NamedTrajectory> runs;
  std::map<std::pair<int, double>, bool> baseline_done;
  auto add_baseline = [&](GradeDirection g, double ttg, const Trajectory& tr) {
    if (baseline_done[{static_cast<int>(g), ttg}]) return;
    baseline_done[{static_cast<int>(g), ttg}] = true;
    runs.push_back({std::string("baseline_") + to_string(g) + "_ttg" + fmt(ttg), tr, hc.road(g)});
  };
  for (const auto& r : cells) {
    add_baseline(r.spec.grade, r.spec.ttg_s, r.baseline);
    if (r.spec.kind == ScenarioKind::Uninformed) continue;
    for (std::size_t i = 0; i < r.trajectories.size(); ++i) {
      runs.push_back({cell_id(r.spec) + "_r" + std::to_string(i), r.trajectories[i], hc.road(r.spec.grade)});
    }
  }
  for (const auto& s : sweep) add_baseline(s.grade, s.ttg_s, s.result.baseline);

  write_stream(dir / "trajectories.csv", [&](std::ostream& os) { write_trajectories_csv(os, runs, hc.vehicle); });
  write_file(dir / "summary.json", summary_json(cells, sweep, proportions));
  if (!cells.empty()) write_stream(dir / "replications.csv", [&](std::ostream& os) { write_replications_csv(os, cells); });
  if (c.verbose) write_stream(dir / "planning_trace.csv", [&](std::ostream& os) { write_planning_trace_csv(os, runs); });

  if (!sweep.empty()) {
    write_stream(dir / "sweep.csv", [&](std::ostream& os) {
      os << "grade,ttg_s,bias_s,sd_s,replications,mean_fuel_L,sd_fuel_L,baseline_fuel_L,savings_pct,"
            "savings_proportion,red_light_violations,completed\n";
      for (std::size_t i = 0; i < sweep.size(); ++i) {
        const SweepCell& s = sweep[i];
        std::size_t viol = 0;
        for (const auto& rep : s.result.reps) viol += rep.audit.red_violation ? 1 : 0;
        char buf[512];
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%zu,%.17g,%.17g,%.17g,%.17g,", to_string(s.grade).c_str(),
                      s.ttg_s, s.bias_s, s.sd_s, s.result.reps.size(), s.result.mean_fuel_L, s.result.sd_fuel_L,
                      s.result.baseline_fuel_L, s.result.savings_vs_baseline_pct);
        os << buf;
        if (i < proportions.size() && proportions[i].proportion) {
          std::snprintf(buf, sizeof buf, "%.17g", *proportions[i].proportion);
          os << buf;
        }
        os << ',' << viol << ',' << (s.result.all_completed() ? 1 : 0) << '\n';
      }
    });
  }

  if (c.plots) {
    log("writing figures");
    for (const auto& r : cells) {
      std::vector<svg::Series> series;
      if (r.spec.kind != ScenarioKind::Uninformed && !r.trajectories.empty()) {
        series.push_back({"GLOSA (" + to_string(r.spec.kind) + ")", r.trajectories.front()});
      }
      series.push_back({"baseline", r.baseline});
      const std::string title = to_string(r.spec.kind) + ", " + to_string(r.spec.grade) + "hill, TTG " +
                                fmt(r.spec.ttg_s) + " s";
      write_file(dir / ("trajectory_" + cell_id(r.spec) + ".svg"),
                 svg::trajectory_panels(title, series, hc.optimizer.max_brake_mps2));
    }
    if (matrix) write_file(dir / "savings.svg", svg::savings_bars("Fuel savings vs baseline", cells));
    if (!sweep.empty()) {
      const SweepGrid& g = *c.sweep;
      std::size_t base = 0;
      for (GradeDirection grade : g.grades) {
        for (double ttg : g.ttgs) {
          std::vector<std::optional<double>> sav, prop;
          for (std::size_t k = 0; k < g.biases.size() * g.sds.size(); ++k) {
            sav.emplace_back(sweep[base + k].result.savings_vs_baseline_pct);
            prop.push_back(proportions[base + k].proportion);
          }
          base += g.biases.size() * g.sds.size();
          const std::string tag = to_string(grade) + "_ttg" + fmt(ttg);
          const std::string where = to_string(grade) + "hill, TTG " + fmt(ttg) + " s";
          write_file(dir / ("sweep_savings_" + tag + ".svg"),
                     svg::heatmap("Fuel savings vs baseline, " + where, "%", g.biases, g.sds, sav));
          write_file(dir / ("sweep_proportion_" + tag + ".svg"),
                     svg::heatmap("Share of deterministic savings retained, " + where, "ratio", g.biases, g.sds, prop));
        }
      }
    }
  }
  log("outputs in " + dir.string());

  std::vector<std::string> diags = run_diagnostics(cells);
  for (const auto& s : sweep) {
    for (auto& d : run_diagnostics({s.result})) diags.push_back("sweep " + d);
  }
  if (!diags.empty()) {
    error_record("runtime", diags);
    return kExitRuntime;
  }
  return 0;
}

int cmd_validate(const Options& o) {
  ExperimentConfig c = resolve(o);
  std::cout << to_json(c);
  const auto v = c.violations();
  if (!v.empty()) {
    error_record("config", v);
    return kExitConfig;
  }
  std::cerr << "configuration valid\n";
  return 0;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
  app->add_option("--set", o.sets, "Override a config key, e.g. optimizer.jerk_limit_mps3=1.0")->take_all();
  app->add_option("--scenario", o.scenario, "Run a single cell: base, det or stoch");
  app->add_option("--ttg", o.ttg, "Time to green at the start, s");
  app->add_option("--grade", o.grade, "down or up");
  app->add_option("--v0", o.v0, "Initial speed, m/s");
  app->add_option("--bias", o.bias, "Prediction bias, s");
  app->add_option("--sd", o.sd, "Prediction standard deviation, s");
  app->add_option("--reps", o.reps, "Stochastic replications");
  app->add_option("--seed", o.seed, "Master seed");
  app->add_option("--sweep", o.sweep, "default: run the bias x sd sensitivity sweep");
  app->add_option("--out", o.out, "Output directory");
  app->add_flag("--plots", o.plots, "Write SVG figures");
  app->add_flag("--verbose", o.verbose, "Progress on stderr and a per-step planning trace");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Green-light optimal speed advisory experiments"};
  app.require_subcommand(1);
  Options o;
  CLI::App* run = app.add_subcommand("run", "Execute scenarios and write outputs");
  CLI::App* validate = app.add_subcommand("validate", "Check a configuration without running it");
  add_common(run, o);
  add_common(validate, o);
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_record("config", {e.what()});
    return kExitConfig;
  }
  try {
    return run->parsed() ? cmd_run(o) : cmd_validate(o);
  } catch (const ConfigError& e) {
    error_record("config", e.messages);
    return kExitConfig;
  } catch (const std::exception& e) {
    error_record("runtime", {e.what()});
    return kExitRuntime;
  }
}
