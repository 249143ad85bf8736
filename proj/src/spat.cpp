#include "glosa/spat.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace glosa {

namespace {

constexpr int kMaxRejections = 64;

// Inverse-CDF draw from N(mean, sd^2) restricted to [lower, inf). Used only
// when rejection keeps failing, i.e. the truncation point is deep in the tail.
double tail_draw(double mean, double sd, double lower, std::mt19937_64& rng) {
  const boost::math::normal_distribution<double> unit(0.0, 1.0);
  const double z_lo = (lower - mean) / sd;
  const double upper_mass = boost::math::cdf(boost::math::complement(unit, z_lo));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double q = std::max(u(rng) * upper_mass, std::numeric_limits<double>::min());
  const double z = boost::math::quantile(boost::math::complement(unit, q));
  return std::max(lower, mean + sd * z);
}

}  // namespace

std::vector<std::string> PredictionModel::violations() const {
  std::vector<std::string> out;
  if (!(sd_s >= 0.0)) out.emplace_back("PredictionModel.sd_s >= 0");
  if (!std::isfinite(bias_s)) out.emplace_back("PredictionModel.bias_s finite");
  return out;
}

SpatSample sample_prediction(const SignalTiming& timing, double bias_s, double sd_s, double now_s,
                             std::mt19937_64& rng) {
  SpatSample s{now_s, 0.0, bias_s, sd_s};
  const double mean = timing.true_switch_time_s + bias_s;
  if (sd_s <= 0.0) {
    s.predicted_switch_time_s = std::max(mean, now_s);
    return s;
  }
  std::normal_distribution<double> normal(mean, sd_s);
  for (int i = 0; i < kMaxRejections; ++i) {
    const double draw = normal(rng);
    if (draw >= now_s) {
      s.predicted_switch_time_s = draw;
      return s;
    }
  }
  s.predicted_switch_time_s = tail_draw(mean, sd_s, now_s, rng);
  return s;
}

SpatSample sample_prediction(const SignalTiming& timing, const PredictionModel& model, double now_s,
                             std::mt19937_64& rng) {
  return sample_prediction(timing, model.bias_s, model.sd_s, now_s, rng);
}

double error_bound(double bias_s, double sd_s, double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("error_bound: confidence must lie in (0, 1)");
  }
  if (sd_s == 0.0) return bias_s;
  const boost::math::normal_distribution<double> unit(0.0, 1.0);
  const double z = boost::math::quantile(unit, 0.5 + 0.5 * confidence);
  return bias_s + z * sd_s;
}

double error_bound(const PredictionModel& model, double confidence) {
  return error_bound(model.bias_s, model.sd_s, confidence);
}

SpatStream SpatStream::deterministic(SignalTiming timing) { return SpatStream(Mode::Deterministic, timing); }

SpatStream SpatStream::stochastic(SignalTiming timing, PredictionModel model) {
  SpatStream s(Mode::Stochastic, timing);
  s.rng_.seed(model.rng_seed);
  s.model_ = std::move(model);
  return s;
}

SpatStream SpatStream::replay(SignalTiming timing, std::vector<SpatSample> samples) {
  SpatStream s(Mode::Replay, timing);
  s.replay_ = std::move(samples);
  return s;
}

SpatSample SpatStream::next(double now_s, double remaining_m) {
  SpatSample s;
  switch (mode_) {
    case Mode::Deterministic:
      s = {now_s, std::max(timing_.true_switch_time_s, now_s), 0.0, 0.0};
      break;
    case Mode::Stochastic: {
      double bias = model_.bias_s;
      double sd = model_.sd_s;
      if (model_.schedule) std::tie(bias, sd) = model_.schedule(remaining_m);
      s = sample_prediction(timing_, bias, sd, now_s, rng_);
      break;
    }
    case Mode::Replay: {
      // Latest recorded sample issued at or before now.
      while (replay_pos_ + 1 < replay_.size() && replay_[replay_pos_ + 1].issued_at_s <= now_s + 1e-9) {
        ++replay_pos_;
      }
      if (replay_.empty()) throw std::runtime_error("SpatStream: replay stream is empty");
      s = replay_[replay_pos_];
      s.issued_at_s = now_s;
      s.predicted_switch_time_s = std::max(s.predicted_switch_time_s, now_s);
      break;
    }
  }
  log_.push_back(s);
  return s;
}

void write_spat_csv(std::ostream& os, const std::vector<SpatSample>& samples) {
  os << "issued_at_s,predicted_switch_time_s\n";
  os << std::setprecision(17);
  for (const auto& s : samples) os << s.issued_at_s << ',' << s.predicted_switch_time_s << '\n';
}

std::vector<SpatSample> read_spat_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("issued_at_s,predicted_switch_time_s", 0) != 0) {
    throw std::runtime_error("spat csv: missing header");
  }
  std::vector<SpatSample> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("spat csv: bad row at line " + std::to_string(lineno));
    SpatSample s;
    try {
      s.issued_at_s = std::stod(line.substr(0, comma));
      s.predicted_switch_time_s = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw std::runtime_error("spat csv: bad number at line " + std::to_string(lineno));
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace glosa
