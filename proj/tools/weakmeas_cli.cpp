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

// weakmeas: reproduce the weak-measurement figures as CSV + SVG.
//
//   weakmeas fig2   [--config f] [--out dir] [--seed n] [--shots n] [--grid n]
//   weakmeas fig3   ...
//   weakmeas supp   ...
//   weakmeas custom --config f ...

#include <algorithm>
#include <exception>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "weakmeas/figures.hpp"

namespace {

using weakmeas::Experiment;

std::vector<Experiment> family_of(const std::string& command) {
  if (command == "fig2") {
    return {Experiment::fig2_single, Experiment::fig2_double, Experiment::fig2_reversal};
  }
  if (command == "fig3") return {Experiment::fig3_tunnel};
  if (command == "supp") {
    return {Experiment::supp4_success, Experiment::supp5_expectations,
            Experiment::supp6_steering};
  }
  return {Experiment::custom};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak-measurement simulator: analytic curves and Monte Carlo ensembles"};
  app.require_subcommand(1, 1);

  std::optional<std::string> config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> shots;
  std::optional<int> grid;
  std::optional<unsigned> threads;
  std::optional<bool> svg;

  for (const char* name : {"fig2", "fig3", "supp", "custom"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "Flat YAML run configuration");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--seed", seed, "Root RNG seed");
    sub->add_option("--shots", shots, "Monte Carlo shots per sweep point")
        ->check(CLI::Range(std::int64_t{1}, std::numeric_limits<std::int64_t>::max()));
    sub->add_option("--grid", grid, "Number of sweep points")->check(CLI::Range(2, 100000));
    sub->add_option("--threads", threads, "Worker threads per ensemble")
        ->check(CLI::Range(1u, 1024u));
    sub->add_flag_function("--svg,!--no-svg",
                           [&svg](std::int64_t count) { svg = count > 0; },
                           "Write SVG plots next to the CSV files");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "weakmeas: " << e.what() << "\n";
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    weakmeas::RunConfig config;
    if (config_path) config = weakmeas::load_run_config(*config_path);

    const auto family = family_of(command);
    if (config.experiments.empty()) {
      config.experiments = family;
    } else {
      for (Experiment e : config.experiments) {
        if (std::find(family.begin(), family.end(), e) == family.end()) {
          throw std::invalid_argument("experiment '" +
                                      std::string(weakmeas::experiment_name(e)) +
                                      "' does not belong to subcommand '" + command + "'");
        }
      }
    }
    if (out_dir) config.output_dir = *out_dir;
    if (seed) config.rng_seed = *seed;
    if (shots) config.n_shots = *shots;
    if (threads) config.threads = *threads;
    if (svg) config.emit_svg = *svg;
    if (grid) {
      if (command == "fig3") {
        config.gamma_grid = weakmeas::default_gamma_grid(config.t_m, *grid);
      } else {
        config.theta_grid = weakmeas::default_theta_grid(*grid);
      }
    }
    config.validate();

    std::vector<std::filesystem::path> written;
    if (command == "fig2") {
      written = weakmeas::run_fig2(config);
    } else if (command == "fig3") {
      written = weakmeas::run_fig3(config);
    } else if (command == "supp") {
      written = weakmeas::run_supp_figs(config);
    } else {
      written = weakmeas::run_custom(config);
    }
    for (const auto& path : written) std::cout << path.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "weakmeas: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
