#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace glosa {

struct SignalTiming {
  double true_switch_time_s = 0.0;  // red -> green, from simulation start
  bool red_at_start = true;

  bool is_red(double t) const { return red_at_start && t < true_switch_time_s; }
};

/// Switching-time prediction error: N(t_s + bias, sd^2), truncated at the
/// current time.
struct PredictionModel {
  double bias_s = 0.0;
  double sd_s = 0.0;
  std::uint64_t rng_seed = 0;
  /// Optional override of (bias, sd) as a function of the distance remaining
  /// to the stop bar. Unset means constant parameters for the whole run.
  std::function<std::pair<double, double>(double remaining_m)> schedule;

  std::vector<std::string> violations() const;
};

struct SpatSample {
  double issued_at_s = 0.0;
  double predicted_switch_time_s = 0.0;
  double bias_s = 0.0;
  double sd_s = 0.0;
};

/// Draws one prediction. Degenerate (sd == 0) draws do not touch the engine.
SpatSample sample_prediction(const SignalTiming& timing, double bias_s, double sd_s, double now_s,
                             std::mt19937_64& rng);
SpatSample sample_prediction(const SignalTiming& timing, const PredictionModel& model, double now_s,
                             std::mt19937_64& rng);

/// bias + z * sd with z the two-sided standard-normal quantile.
double error_bound(const PredictionModel& model, double confidence);
double error_bound(double bias_s, double sd_s, double confidence);

/// Per-step prediction source for one run: exact, stochastic or replayed.
class SpatStream {
 public:
  enum class Mode { Deterministic, Stochastic, Replay };

  static SpatStream deterministic(SignalTiming timing);
  static SpatStream stochastic(SignalTiming timing, PredictionModel model);
  static SpatStream replay(SignalTiming timing, std::vector<SpatSample> samples);

  /// Prediction issued at `now_s`. `remaining_m` feeds the optional schedule.
  SpatSample next(double now_s, double remaining_m = 0.0);

  Mode mode() const { return mode_; }
  const SignalTiming& timing() const { return timing_; }
  /// Every sample issued so far, in order.
  const std::vector<SpatSample>& log() const { return log_; }

 private:
  SpatStream(Mode mode, SignalTiming timing) : mode_(mode), timing_(timing) {}

  Mode mode_;
  SignalTiming timing_;
  PredictionModel model_;
  std::mt19937_64 rng_;
  std::vector<SpatSample> replay_;
  std::size_t replay_pos_ = 0;
  std::vector<SpatSample> log_;
};

void write_spat_csv(std::ostream& os, const std::vector<SpatSample>& samples);
/// Parses the columns written by write_spat_csv. Throws std::runtime_error on malformed input.
std::vector<SpatSample> read_spat_csv(std::istream& is);

}  // namespace glosa
