#include "glosa/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace glosa::svg {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

class Doc {
 public:
  Doc(int w, int h) : w_(w), h_(h) {}

  void text(double x, double y, const std::string& s, int size = 12, const char* anchor = "middle",
            double rotate = 0.0) {
    os_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-size=\"" << size << "\" text-anchor=\""
        << anchor << "\"";
    if (rotate != 0.0) os_ << " transform=\"rotate(" << fmt(rotate) << ' ' << fmt(x) << ' ' << fmt(y) << ")\"";
    os_ << ">" << escape(s) << "</text>\n";
  }
  void line(double x1, double y1, double x2, double y2, const char* stroke = "#000", double width = 1.0) {
    os_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2) << "\" y2=\"" << fmt(y2)
        << "\" stroke=\"" << stroke << "\" stroke-width=\"" << fmt(width) << "\"/>\n";
  }
  void rect(double x, double y, double w, double h, const std::string& fill, const char* stroke = "none") {
    os_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
        << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const char* stroke) {
    os_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) os_ << ' ';
      os_ << fmt(pts[i].first) << ',' << fmt(pts[i].second);
    }
    os_ << "\"/>\n";
  }

  std::string str() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_
        << "\" viewBox=\"0 0 " << w_ << ' ' << h_ << "\" font-family=\"sans-serif\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    out << os_.str() << "</svg>\n";
    return out.str();
  }

 private:
  int w_, h_;
  std::ostringstream os_;
};

struct Range {
  double lo = 0.0, hi = 1.0;
  void pad() {
    if (hi - lo < 1e-9) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

// Axes box with 5 ticks on each axis.
void axes(Doc& d, double x0, double y0, double w, double h, Range xr, Range yr, const std::string& xl,
          const std::string& yl) {
  d.line(x0, y0 + h, x0 + w, y0 + h);
  d.line(x0, y0, x0, y0 + h);
  for (int i = 0; i <= 4; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double px = x0 + w * i / 4.0;
    d.line(px, y0 + h, px, y0 + h + 4);
    d.text(px, y0 + h + 16, fmt(fx), 10);
    const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    const double py = y0 + h - h * i / 4.0;
    d.line(x0 - 4, py, x0, py);
    d.text(x0 - 6, py + 3, fmt(fy), 10, "end");
  }
  d.text(x0 + w / 2, y0 + h + 32, xl, 11);
  d.text(x0 - 42, y0 + h / 2, yl, 11, "middle", -90.0);
}

double pedal(const Control& c, double max_brake) {
  return c.is_brake() ? -c.value / max_brake : c.value;
}

// Blue (low) to red (high).
std::string colour(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(40 + 200 * t));
  const int g = static_cast<int>(std::lround(90 + 100 * (1.0 - std::abs(2.0 * t - 1.0))));
  const int b = static_cast<int>(std::lround(220 - 180 * t));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string trajectory_panels(const std::string& title, const std::vector<Series>& series, double max_brake_mps2) {
  const int w = 900, h = 760;
  Doc d(w, h);
  d.text(w / 2.0, 24, title, 15);

  struct Panel {
    const char* label;
    double (*get)(const VehicleState&, double);
  };
  const Panel panels[] = {
      {"distance (m)", [](const VehicleState& s, double) { return s.position_m; }},
      {"speed (m/s)", [](const VehicleState& s, double) { return s.speed_mps; }},
      {"acceleration (m/s^2)", [](const VehicleState& s, double) { return s.accel_mps2; }},
      {"pedal (throttle +, brake -)", [](const VehicleState& s, double mb) { return pedal(s.control, mb); }},
  };

  Range tr{0.0, 0.0};
  for (const auto& s : series) {
    if (!s.trajectory.empty()) tr.hi = std::max(tr.hi, s.trajectory.back().time_s);
  }
  tr.pad();

  const double pw = 360, ph = 250;
  for (int p = 0; p < 4; ++p) {
    const double x0 = 80 + (p % 2) * 440;
    const double y0 = 50 + (p / 2) * 330;
    Range yr{1e300, -1e300};
    for (const auto& s : series) {
      for (const auto& st : s.trajectory.states) {
        const double v = panels[p].get(st, max_brake_mps2);
        yr.lo = std::min(yr.lo, v);
        yr.hi = std::max(yr.hi, v);
      }
    }
    if (yr.lo > yr.hi) yr = {0.0, 1.0};
    yr.pad();
    axes(d, x0, y0, pw, ph, tr, yr, "time (s)", panels[p].label);
    for (std::size_t i = 0; i < series.size(); ++i) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& st : series[i].trajectory.states) {
        const double v = panels[p].get(st, max_brake_mps2);
        pts.emplace_back(x0 + pw * (st.time_s - tr.lo) / (tr.hi - tr.lo), y0 + ph - ph * (v - yr.lo) / (yr.hi - yr.lo));
      }
      d.polyline(pts, kPalette[i % 6]);
    }
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = h - 16.0 - 14.0 * static_cast<double>(series.size() - 1 - i);
    d.line(80, y - 4, 100, y - 4, kPalette[i % 6], 2.0);
    d.text(106, y, series[i].label, 11, "start");
  }
  return d.str();
}

std::string savings_bars(const std::string& title, const std::vector<RunResult>& cells) {
  // (grade, ttg) -> {deterministic, stochastic}
  std::map<std::pair<int, double>, std::pair<std::optional<double>, std::optional<double>>> groups;
  for (const auto& c : cells) {
    auto& g = groups[{static_cast<int>(c.spec.grade), c.spec.ttg_s}];
    if (c.spec.kind == ScenarioKind::Deterministic) g.first = c.savings_vs_baseline_pct;
    if (c.spec.kind == ScenarioKind::Stochastic) g.second = c.savings_vs_baseline_pct;
  }
  const int w = 900, h = 420;
  Doc d(w, h);
  d.text(w / 2.0, 24, title, 15);
  Range yr{0.0, 10.0};
  for (const auto& [_, v] : groups) {
    for (const auto& x : {v.first, v.second}) {
      if (x) {
        yr.lo = std::min(yr.lo, *x);
        yr.hi = std::max(yr.hi, *x);
      }
    }
  }
  yr.hi = std::ceil(yr.hi / 10.0) * 10.0;
  yr.lo = std::floor(yr.lo / 10.0) * 10.0;
  const double x0 = 80, y0 = 50, pw = 780, ph = 280;
  axes(d, x0, y0, pw, ph, Range{0, 1}, yr, "", "fuel savings vs baseline (%)");
  const double zero_y = y0 + ph - ph * (0.0 - yr.lo) / (yr.hi - yr.lo);
  d.line(x0, zero_y, x0 + pw, zero_y, "#888");
  const double n = static_cast<double>(std::max<std::size_t>(groups.size(), 1));
  const double gw = pw / n;
  std::size_t i = 0;
  for (const auto& [key, v] : groups) {
    const double gx = x0 + gw * static_cast<double>(i);
    int j = 0;
    for (const auto& x : {v.first, v.second}) {
      if (x) {
        const double top = y0 + ph - ph * (*x - yr.lo) / (yr.hi - yr.lo);
        d.rect(gx + gw * (0.15 + 0.35 * j), std::min(top, zero_y), gw * 0.33, std::abs(zero_y - top),
               kPalette[j]);
      }
      ++j;
    }
    const std::string label = std::string(key.first == 0 ? "down" : "up") + " TTG " + fmt(key.second);
    d.text(gx + gw / 2, y0 + ph + 16, label, 10);
    ++i;
  }
  d.rect(x0, h - 40, 12, 12, kPalette[0]);
  d.text(x0 + 18, h - 30, "deterministic", 11, "start");
  d.rect(x0 + 140, h - 40, 12, 12, kPalette[1]);
  d.text(x0 + 158, h - 30, "stochastic", 11, "start");
  return d.str();
}

std::string heatmap(const std::string& title, const std::string& value_label, const std::vector<double>& biases,
                    const std::vector<double>& sds, const std::vector<std::optional<double>>& values) {
  const int w = 760, h = 560;
  Doc d(w, h);
  d.text(w / 2.0, 24, title, 15);
  double lo = 1e300, hi = -1e300;
  for (const auto& v : values) {
    if (v) {
      lo = std::min(lo, *v);
      hi = std::max(hi, *v);
    }
  }
  if (lo > hi) lo = hi = 0.0;
  const double x0 = 90, y0 = 50, pw = 520, ph = 420;
  const double cw = pw / static_cast<double>(std::max<std::size_t>(sds.size(), 1));
  const double ch = ph / static_cast<double>(std::max<std::size_t>(biases.size(), 1));
  for (std::size_t b = 0; b < biases.size(); ++b) {
    for (std::size_t s = 0; s < sds.size(); ++s) {
      const std::size_t idx = b * sds.size() + s;
      const auto v = idx < values.size() ? values[idx] : std::nullopt;
      const double t = (v && hi > lo) ? (*v - lo) / (hi - lo) : 0.5;
      // Bias grows upwards.
      const double y = y0 + ph - ch * static_cast<double>(b + 1);
      d.rect(x0 + cw * static_cast<double>(s), y, cw, ch, v ? colour(t) : std::string("#cccccc"), "#fff");
      if (v) d.text(x0 + cw * (static_cast<double>(s) + 0.5), y + ch / 2 + 4, fmt(*v), 9);
    }
    d.text(x0 - 6, y0 + ph - ch * (static_cast<double>(b) + 0.5) + 4, fmt(biases[b]), 10, "end");
  }
  for (std::size_t s = 0; s < sds.size(); ++s) d.text(x0 + cw * (static_cast<double>(s) + 0.5), y0 + ph + 16, fmt(sds[s]), 10);
  d.text(x0 + pw / 2, y0 + ph + 34, "prediction standard deviation (s)", 11);
  d.text(x0 - 50, y0 + ph / 2, "prediction bias (s)", 11, "middle", -90.0);
  // Colour key.
  for (int i = 0; i < 20; ++i) d.rect(x0 + pw + 30, y0 + ph - (i + 1) * ph / 20.0, 18, ph / 20.0, colour(i / 19.0));
  d.text(x0 + pw + 52, y0 + ph, fmt(lo), 10, "start");
  d.text(x0 + pw + 52, y0 + 8, fmt(hi), 10, "start");
  d.text(x0 + pw + 39, y0 - 8, value_label, 10);
  return d.str();
}

}  // namespace glosa::svg
