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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace weakmeas {

// One point of a parameter sweep: analytic value and Monte Carlo estimate.
// Empty optionals are written as empty CSV cells (impossible branch, no
// kept shots).
struct SweepRow {
  double sweep_value = 0.0;
  std::optional<double> analytic;
  std::optional<double> mc_mean;
  std::optional<double> mc_std_error;
  std::int64_t n_kept = 0;
  std::int64_t n_total = 0;
};

struct PlotStyle {
  std::string title;
  std::string x_label = "theta (rad)";
  std::string y_label;
  bool log_x = false;
  // Fixed y range; computed from the data when unset.
  std::optional<double> y_min;
  std::optional<double> y_max;
};

PlotStyle expectation_style(std::string title, std::string y_label);
PlotStyle probability_style(std::string title);

// Self-contained SVG: analytic polyline, MC markers with +-1 std_error bars.
// Rows must be non-empty and sorted by sweep_value.
std::string emit_plot(const std::vector<SweepRow>& rows, const PlotStyle& style);

// 17 significant digits; "inf"/"-inf" for infinities.
std::string format_real(double v);
std::string format_cell(const std::optional<double>& v);

// Header "<sweep_name>,analytic,mc_mean,mc_std_error,n_kept,n_total".
std::string sweep_csv(const std::vector<SweepRow>& rows, const std::string& sweep_name);

}  // namespace weakmeas
