#pragma once

// Self-contained SVG figures. Every function is a pure function of its
// inputs: the same results always give byte-identical text.

#include <optional>
#include <string>
#include <vector>

#include "glosa/fuel.hpp"
#include "glosa/harness.hpp"

namespace glosa::svg {

struct Series {
  std::string label;
  Trajectory trajectory;
};

/// Distance, speed, acceleration and pedal (throttle fraction, or brake as a
/// negative fraction of the maximum deceleration) against time.
std::string trajectory_panels(const std::string& title, const std::vector<Series>& series,
                              double max_brake_mps2 = -6.0);

/// Grouped bars of deterministic and stochastic savings per grade and TTG.
std::string savings_bars(const std::string& title, const std::vector<RunResult>& cells);

/// Bias (rows) x sd (columns) colour grid. Empty values render grey.
std::string heatmap(const std::string& title, const std::string& value_label, const std::vector<double>& biases,
                    const std::vector<double>& sds, const std::vector<std::optional<double>>& values);

}  // namespace glosa::svg
