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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "weakmeas/montecarlo.hpp"

namespace weakmeas {

enum class Experiment {
  fig2_single,
  fig2_double,
  fig2_reversal,
  fig3_tunnel,
  supp4_success,
  supp5_expectations,
  supp6_steering,
  custom,
};

std::string_view experiment_name(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);

// Default shot count when the configuration leaves n_shots unset.
std::int64_t default_shots(Experiment e);

std::vector<double> default_theta_grid(int points = 41);
// Log-spaced over Gamma * t_m in [0.05, 10].
std::vector<double> default_gamma_grid(double t_m, int points = 12);

struct RunConfig {
  std::vector<Experiment> experiments;
  std::vector<double> theta_grid = default_theta_grid();
  std::vector<double> gamma_grid;  // 1/ms; empty selects default_gamma_grid(t_m)
  double t_m = 1.5;                // ms
  std::optional<std::int64_t> n_shots;
  std::uint64_t rng_seed = 42;
  unsigned threads = 1;
  NoiseConfig noise;
  std::filesystem::path output_dir = "out";
  bool emit_svg = true;

  // Custom experiment: initial nuclear state and step list, e.g.
  //   "pulse nu_e2 theta", "readout no_blip", "pulse nu_e1 1.5708 0.0"
  std::string custom_initial = "superposition_x";
  std::vector<std::string> custom_steps;

  std::int64_t shots_for(Experiment e) const {
    return n_shots ? *n_shots : default_shots(e);
  }
  std::vector<double> effective_gamma_grid() const;
  void validate() const;
};

// Flat YAML mapping; unknown keys and nested mappings are rejected.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

// Builds a custom protocol, substituting `theta` for the angle token "theta".
Protocol build_custom_protocol(const RunConfig& config, double theta, PauliAxis axis);

}  // namespace weakmeas
