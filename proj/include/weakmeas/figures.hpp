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

// Figure reproduction: analytic curves next to Monte Carlo ensembles,
// written as <out>/<experiment>_<panel>.csv and .svg.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "weakmeas/config.hpp"
#include "weakmeas/plot.hpp"

namespace weakmeas {

struct Panel {
  Experiment experiment = Experiment::fig2_single;
  std::string name;                  // e.g. "sigma_z"
  std::string sweep_name = "theta";  // CSV header of the sweep column
  std::vector<SweepRow> rows;
  PlotStyle style;

  std::string file_stem() const;
};

// Conditional pulse chain of the three tomography experiments.
std::vector<SequenceStep> fig2_sequence(Experiment experiment, double theta);
// Same chain with projective no-blip readouts and a final tomography.
Protocol fig2_protocol(Experiment experiment, double theta, PauliAxis axis);
// Bell preparation, one readout window kept on no blip, sigma_z tomography.
Protocol tunnel_protocol(const TunnelModel& model);
// Bell preparation, unconditional electron rotation, projective readout.
Protocol steering_protocol(double theta, PauliAxis axis);

std::vector<Panel> fig2_panels(const RunConfig& config, Experiment experiment);
std::vector<Panel> supp_panels(const RunConfig& config, Experiment experiment);
std::vector<Panel> custom_panels(const RunConfig& config);

struct TunnelRatePoint {
  double gamma = 0.0;  // 1/ms
  double t_m = 0.0;
  double sigma_z_analytic = 0.0;
  EnsembleStats mc;
  TunnelTimeEstimate extracted;  // sigma_z inversion of the MC mean
  double extracted_lower = 0.0;  // 95% interval, ms (may be +inf)
  double extracted_upper = 0.0;
  RateEstimate blip_mle;

  double inv_gamma_true() const { return 1.0 / gamma; }
  // Both estimates are defined and their 95% intervals intersect.
  bool intervals_overlap() const;
};

// One synthetic dataset feeding both tunnel-time estimators.
TunnelRatePoint tunnel_rate_point(double gamma, double t_m, std::int64_t n_shots,
                                  std::uint64_t rng_seed, const NoiseConfig& noise,
                                  unsigned threads = 1);

std::vector<TunnelRatePoint> fig3_points(const RunConfig& config);
std::string fig3_csv(const std::vector<TunnelRatePoint>& points);
std::vector<Panel> fig3_panels(const std::vector<TunnelRatePoint>& points);

// Each writes the CSV (and SVG when enabled) files and returns their paths.
std::vector<std::filesystem::path> run_fig2(const RunConfig& config);
std::vector<std::filesystem::path> run_fig3(const RunConfig& config);
std::vector<std::filesystem::path> run_supp_figs(const RunConfig& config);
std::vector<std::filesystem::path> run_custom(const RunConfig& config);

}  // namespace weakmeas
