/* Copyright 2026 The weakmeas Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "weakmeas/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace weakmeas {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
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

class Axes {
 public:
  Axes(double x0, double x1, double y0, double y1, bool log_x)
      : log_x_(log_x), x0_(tx(x0)), x1_(tx(x1)), y0_(y0), y1_(y1) {
    if (x1_ == x0_) {
      x0_ -= 0.5;
      x1_ += 0.5;
    }
    if (y1_ == y0_) {
      y0_ -= 0.5;
      y1_ += 0.5;
    }
  }

  double px(double x) const {
    return kLeft + (tx(x) - x0_) / (x1_ - x0_) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    const double clamped = std::clamp(y, y0_, y1_);
    return kHeight - kBottom - (clamped - y0_) / (y1_ - y0_) * (kHeight - kTop - kBottom);
  }
  double y0() const { return y0_; }
  double y1() const { return y1_; }
  double x_at(double frac) const {
    const double t = x0_ + frac * (x1_ - x0_);
    return log_x_ ? std::pow(10.0, t) : t;
  }

 private:
  double tx(double x) const { return log_x_ ? std::log10(x) : x; }

  bool log_x_;
  double x0_, x1_, y0_, y1_;
};

}  // namespace

PlotStyle expectation_style(std::string title, std::string y_label) {
  PlotStyle style;
  style.title = std::move(title);
  style.y_label = std::move(y_label);
  style.y_min = -1.05;
  style.y_max = 1.05;
  return style;
}

PlotStyle probability_style(std::string title) {
  PlotStyle style;
  style.title = std::move(title);
  style.y_label = "success probability";
  style.y_min = 0.0;
  style.y_max = 1.05;
  return style;
}

std::string emit_plot(const std::vector<SweepRow>& rows, const PlotStyle& style) {
  if (rows.empty()) throw std::invalid_argument("emit_plot: no rows");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].sweep_value < rows[i - 1].sweep_value) {
      throw std::invalid_argument("emit_plot: rows not sorted by sweep value");
    }
  }
  if (style.log_x) {
    for (const SweepRow& r : rows) {
      if (!(r.sweep_value > 0.0)) {
        throw std::invalid_argument("emit_plot: log axis needs positive sweep values");
      }
    }
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const auto extend = [&](double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  };
  for (const SweepRow& r : rows) {
    if (r.analytic) extend(*r.analytic);
    if (r.mc_mean) {
      const double e = r.mc_std_error.value_or(0.0);
      extend(*r.mc_mean - e);
      extend(*r.mc_mean + e);
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  const Axes axes(rows.front().sweep_value, rows.back().sweep_value,
                  style.y_min.value_or(lo - pad), style.y_max.value_or(hi + pad), style.log_x);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fixed(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << escape(style.title) << "</text>\n";

  // Frame and ticks.
  const double bottom = kHeight - kBottom;
  const double right = kWidth - kRight;
  svg << "<rect x=\"" << fixed(kLeft) << "\" y=\"" << fixed(kTop) << "\" width=\""
      << fixed(right - kLeft) << "\" height=\"" << fixed(bottom - kTop)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double x = axes.x_at(i / 4.0);
    const double xp = axes.px(x);
    svg << "<line x1=\"" << fixed(xp) << "\" y1=\"" << fixed(bottom) << "\" x2=\"" << fixed(xp)
        << "\" y2=\"" << fixed(bottom + 5) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fixed(xp) << "\" y=\"" << fixed(bottom + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << tick_label(x) << "</text>\n";
    const double y = axes.y0() + i / 4.0 * (axes.y1() - axes.y0());
    const double yp = axes.py(y);
    svg << "<line x1=\"" << fixed(kLeft - 5) << "\" y1=\"" << fixed(yp) << "\" x2=\""
        << fixed(kLeft) << "\" y2=\"" << fixed(yp) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(yp + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
        << tick_label(y) << "</text>\n";
  }
  svg << "<text x=\"" << fixed((kLeft + right) / 2) << "\" y=\"" << fixed(kHeight - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << escape(style.x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << fixed((kTop + bottom) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 16 " << fixed((kTop + bottom) / 2) << ")\">"
      << escape(style.y_label) << "</text>\n";

  // Analytic curve, broken wherever the analytic value is undefined.
  std::vector<std::string> segments;
  std::string current;
  for (const SweepRow& r : rows) {
    if (r.analytic && std::isfinite(*r.analytic)) {
      current += fixed(axes.px(r.sweep_value)) + "," + fixed(axes.py(*r.analytic)) + " ";
    } else if (!current.empty()) {
      segments.push_back(current);
      current.clear();
    }
  }
  if (!current.empty()) segments.push_back(current);
  for (const std::string& points : segments) {
    svg << "<polyline class=\"analytic\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" "
        << "stroke-dasharray=\"6 3\" points=\"" << points << "\"/>\n";
  }

  for (const SweepRow& r : rows) {
    if (!r.mc_mean || !std::isfinite(*r.mc_mean)) continue;
    const double xp = axes.px(r.sweep_value);
    const double e = r.mc_std_error.value_or(0.0);
    if (e > 0.0) {
      svg << "<line class=\"errorbar\" x1=\"" << fixed(xp) << "\" y1=\""
          << fixed(axes.py(*r.mc_mean - e)) << "\" x2=\"" << fixed(xp) << "\" y2=\""
          << fixed(axes.py(*r.mc_mean + e)) << "\" stroke=\"#c0392b\"/>\n";
    }
    svg << "<circle class=\"mc\" cx=\"" << fixed(xp) << "\" cy=\"" << fixed(axes.py(*r.mc_mean))
        << "\" r=\"3.5\" fill=\"none\" stroke=\"#c0392b\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_cell(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string();
}

std::string sweep_csv(const std::vector<SweepRow>& rows, const std::string& sweep_name) {
  std::string out = sweep_name + ",analytic,mc_mean,mc_std_error,n_kept,n_total\n";
  for (const SweepRow& r : rows) {
    out += format_real(r.sweep_value) + "," + format_cell(r.analytic) + "," +
           format_cell(r.mc_mean) + "," + format_cell(r.mc_std_error) + "," +
           std::to_string(r.n_kept) + "," + std::to_string(r.n_total) + "\n";
  }
  return out;
}

}  // namespace weakmeas
