#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <sstream>

#include "glosa/config.hpp"
#include "glosa/harness.hpp"
#include "glosa/io.hpp"
#include "glosa/svg.hpp"
#include "json.hpp"

using namespace glosa;

namespace {

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

RunResult sample_cell(ScenarioKind kind, double ttg) {
  ScenarioSpec s;
  s.kind = kind;
  s.ttg_s = ttg;
  s.grade = GradeDirection::Uphill;
  if (kind == ScenarioKind::Stochastic) {
    s.bias_s = 2.0;
    s.sd_s = 2.0;
    s.replications = 4;
  }
  HarnessConfig hc;
  hc.keep_trajectories = true;
  return run_scenario(s, hc);
}

}  // namespace

TEST(TrajectoryCsv, RoundTripIsExact) {
  const RunResult r = sample_cell(ScenarioKind::Stochastic, 20.0);
  HarnessConfig hc;
  std::vector<NamedTrajectory> runs;
  for (std::size_t i = 0; i < r.trajectories.size(); ++i) {
    runs.push_back({"run" + std::to_string(i), r.trajectories[i], hc.road(GradeDirection::Uphill)});
  }
  std::stringstream io;
  write_trajectories_csv(io, runs, hc.vehicle);
  const auto back = read_trajectories_csv(io);
  ASSERT_EQ(back.size(), runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Trajectory& a = runs[i].trajectory;
    const Trajectory& b = back[i].trajectory;
    EXPECT_EQ(back[i].run_id, runs[i].run_id);
    EXPECT_EQ(a.dt_s, b.dt_s);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(a.states[k].time_s, b.states[k].time_s);
      EXPECT_EQ(a.states[k].position_m, b.states[k].position_m);
      EXPECT_EQ(a.states[k].speed_mps, b.states[k].speed_mps);
      EXPECT_EQ(a.states[k].accel_mps2, b.states[k].accel_mps2);
      EXPECT_EQ(a.states[k].control, b.states[k].control);
    }
    EXPECT_EQ(trajectory_fuel(b, hc.vehicle, runs[i].road), trajectory_fuel(a, hc.vehicle, runs[i].road));
    EXPECT_EQ(back[i].cum_fuel.back(), trajectory_fuel(a, hc.vehicle, runs[i].road));
  }
}

TEST(TrajectoryCsv, HeaderAndErrors) {
  std::stringstream io;
  write_trajectories_csv(io, {}, VehicleParams{});
  EXPECT_EQ(io.str(), "run_id,t,x,v,a,control_kind,control_value,fuel_rate,cum_fuel,predicted_ttg\n");
  std::stringstream bad("run_id,t,x,v,a,control_kind,control_value,fuel_rate,cum_fuel,predicted_ttg\nr,0,0,1,0,pedal,0,0,0,\n");
  EXPECT_THROW(read_trajectories_csv(bad), std::runtime_error);
  std::stringstream short_row("run_id,t,x,v,a,control_kind,control_value,fuel_rate,cum_fuel,predicted_ttg\nr,0,0\n");
  EXPECT_THROW(read_trajectories_csv(short_row), std::runtime_error);
}

TEST(ReplicationsCsv, OneRowPerReplication) {
  const RunResult r = sample_cell(ScenarioKind::Stochastic, 15.0);
  std::stringstream io;
  write_replications_csv(io, {r});
  const std::string text = io.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 4);
}

TEST(SummaryJson, CarriesPerCellFields) {
  const RunResult r = sample_cell(ScenarioKind::Deterministic, 15.0);
  const auto j = nlohmann::json::parse(summary_json({r}, {}, {}));
  ASSERT_EQ(j["cells"].size(), 1u);
  EXPECT_EQ(j["cells"][0]["kind"], "deterministic");
  EXPECT_EQ(j["cells"][0]["mean_fuel_L"].get<double>(), r.mean_fuel_L);
  EXPECT_EQ(j["cells"][0]["red_light_violations"], 0);
  EXPECT_FALSE(j.contains("sweep"));
}

TEST(Svg, PureFunctionOfResults) {
  const RunResult det = sample_cell(ScenarioKind::Deterministic, 20.0);
  const RunResult sto = sample_cell(ScenarioKind::Stochastic, 20.0);
  const std::vector<svg::Series> series = {{"GLOSA", det.trajectories[0]}, {"baseline", det.baseline}};
  const std::string a = svg::trajectory_panels("t", series);
  EXPECT_EQ(a, svg::trajectory_panels("t", series));
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
  const std::string bars = svg::savings_bars("s", {det, sto});
  EXPECT_EQ(bars, svg::savings_bars("s", {det, sto}));
  const std::string heat = svg::heatmap("h", "%", {0, 1}, {0, 2}, {1.0, std::nullopt, 0.5, 0.25});
  EXPECT_EQ(heat, svg::heatmap("h", "%", {0, 1}, {0, 2}, {1.0, std::nullopt, 0.5, 0.25}));
  EXPECT_NE(heat.find("#cccccc"), std::string::npos);
  EXPECT_NE(svg::trajectory_panels("a<b", series).find("a&lt;b"), std::string::npos);
}

TEST(Config, DefaultsValidate) {
  const LoadResult r = load_config_text("{}");
  EXPECT_TRUE(r.errors.empty());
  EXPECT_TRUE(r.config.violations().empty());
  EXPECT_TRUE(r.config.scenarios.empty());
}

TEST(Config, NegativeSdNamesPredictionModel) {
  const LoadResult r = load_config_text(R"({"experiment": {"scenarios": [{"kind": "stoch", "sd_s": -1}]}})");
  ASSERT_TRUE(r.errors.empty());
  EXPECT_TRUE(mentions(r.config.violations(), "PredictionModel.sd_s >= 0"));
}

TEST(Config, ThrottleAboveOneNamesControlBounds) {
  const LoadResult r = load_config_text(R"({"optimizer": {"throttle_grid": [0, 0.5, 1.2]}})");
  ASSERT_TRUE(r.errors.empty());
  EXPECT_TRUE(mentions(r.config.violations(), "Control bounds"));
}

TEST(Config, ListsEveryViolation) {
  const LoadResult r = load_config_text(R"({
    "vehicle": {"mass_kg": -1},
    "optimizer": {"throttle_grid": [1.2], "dt_s": 0},
    "experiment": {"scenarios": [{"sd_s": -1, "kind": "stoch"}, {"replications": 0}]}
  })");
  ASSERT_TRUE(r.errors.empty());
  const auto v = r.config.violations();
  EXPECT_TRUE(mentions(v, "mass_kg"));
  EXPECT_TRUE(mentions(v, "Control bounds"));
  EXPECT_TRUE(mentions(v, "dt_s"));
  EXPECT_TRUE(mentions(v, "scenarios[0]: PredictionModel.sd_s >= 0"));
  EXPECT_TRUE(mentions(v, "scenarios[1]: ScenarioSpec.replications >= 1"));
}

TEST(Config, ParseAndTypeErrors) {
  EXPECT_FALSE(load_config_text("{not json").errors.empty());
  const LoadResult r = load_config_text(R"({"vehicle": {"mass_kg": "heavy", "colour": 1}, "extra": {}})");
  EXPECT_TRUE(mentions(r.errors, "vehicle.mass_kg"));
  EXPECT_TRUE(mentions(r.errors, "colour"));
  EXPECT_TRUE(mentions(r.errors, "extra"));
  EXPECT_TRUE(mentions(load_config_text(R"({"experiment": {"scenarios": [{"kind": "maybe"}]}})").errors, "kind"));
}

TEST(Config, ResolvedJsonRoundTrips) {
  const LoadResult r = load_config_text(R"({"optimizer": {"jerk_limit_mps3": 1.0},
    "experiment": {"seed": 9, "scenarios": [{"kind": "det", "grade": "up", "ttg_s": 20}], "sweep": {"replications": 3}}})");
  ASSERT_TRUE(r.errors.empty());
  const std::string text = to_json(r.config);
  const LoadResult again = load_config_text(text);
  ASSERT_TRUE(again.errors.empty()) << again.errors.front();
  EXPECT_EQ(to_json(again.config), text);
  EXPECT_EQ(again.config.harness.optimizer.jerk_limit_mps3, 1.0);
  ASSERT_EQ(again.config.scenarios.size(), 1u);
  EXPECT_EQ(again.config.scenarios[0].grade, GradeDirection::Uphill);
  EXPECT_EQ(again.config.scenarios[0].seed, 9u);
  ASSERT_TRUE(again.config.sweep.has_value());
  EXPECT_EQ(again.config.sweep->replications, 3);
}
