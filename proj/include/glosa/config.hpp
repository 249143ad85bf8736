#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "glosa/harness.hpp"

namespace glosa {

struct MatrixSpec {
  double initial_speed_mps = 17.88;
  std::vector<double> ttgs = {10.0, 15.0, 20.0, 25.0};
  int stochastic_reps = 48;  // three passes over the default error grid
  std::vector<std::pair<double, double>> error_grid = default_error_grid();

  static std::vector<std::pair<double, double>> default_error_grid();
};

/// Everything `glosa run` needs, loaded from a JSON file.
struct ExperimentConfig {
  HarnessConfig harness;
  /// Explicit scenarios; when empty the standard scenario matrix runs instead.
  std::vector<ScenarioSpec> scenarios;
  MatrixSpec matrix;
  std::optional<SweepGrid> sweep;
  std::uint64_t seed = 1;
  std::string output_dir = "glosa_out";
  bool plots = false;
  bool verbose = false;

  /// Every violated invariant across all loaded types.
  std::vector<std::string> violations() const;
};

struct LoadResult {
  ExperimentConfig config;
  std::vector<std::string> errors;  // parse and type errors; empty on success
};

/// Missing keys keep their defaults; unknown keys and wrong types are errors.
LoadResult load_config_file(const std::string& path);
LoadResult load_config_text(const std::string& text);

/// The fully resolved configuration as JSON text.
std::string to_json(const ExperimentConfig& config);

}  // namespace glosa
