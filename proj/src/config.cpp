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

#include "weakmeas/config.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <yaml-cpp/yaml.h>

namespace weakmeas {

namespace {

constexpr std::array<std::pair<Experiment, std::string_view>, 8> kExperimentNames{{
    {Experiment::fig2_single, "fig2_single"},
    {Experiment::fig2_double, "fig2_double"},
    {Experiment::fig2_reversal, "fig2_reversal"},
    {Experiment::fig3_tunnel, "fig3_tunnel"},
    {Experiment::supp4_success, "supp4_success"},
    {Experiment::supp5_expectations, "supp5_expectations"},
    {Experiment::supp6_steering, "supp6_steering"},
    {Experiment::custom, "custom"},
}};

[[noreturn]] void reject(const std::string& key, const std::string& what) {
  throw std::invalid_argument("config key '" + key + "': " + what);
}

template <class T>
T scalar(const YAML::Node& node, const std::string& key, const char* type) {
  if (!node.IsScalar()) reject(key, std::string("expected a ") + type);
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    reject(key, std::string("expected a ") + type + ", got '" + node.Scalar() + "'");
  }
}

std::vector<double> number_list(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) reject(key, "expected an array of numbers");
  std::vector<double> out;
  for (const YAML::Node& item : node) out.push_back(scalar<double>(item, key, "number"));
  return out;
}

std::vector<std::string> string_list(const YAML::Node& node, const std::string& key) {
  if (node.IsScalar()) return {node.Scalar()};
  if (!node.IsSequence()) reject(key, "expected a string or an array of strings");
  std::vector<std::string> out;
  for (const YAML::Node& item : node) {
    out.push_back(scalar<std::string>(item, key, "string"));
  }
  return out;
}

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

double parse_number(const std::string& token, const std::string& context) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size() || !std::isfinite(v)) {
    throw std::invalid_argument("custom step '" + context + "': bad number '" + token + "'");
  }
  return v;
}

}  // namespace

std::string_view experiment_name(Experiment e) {
  for (const auto& [value, name] : kExperimentNames) {
    if (value == e) return name;
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (const auto& [value, n] : kExperimentNames) {
    if (n == name) return value;
  }
  return std::nullopt;
}

std::int64_t default_shots(Experiment e) {
  switch (e) {
    case Experiment::fig3_tunnel:
      return 100000;
    case Experiment::supp4_success:
    case Experiment::supp5_expectations:
    case Experiment::supp6_steering:
      return 200;
    default:
      return 2000;
  }
}

std::vector<double> default_theta_grid(int points) {
  if (points < 2) throw std::invalid_argument("theta grid needs at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] = 2.0 * std::numbers::pi * i / (points - 1);
  }
  return grid;
}

std::vector<double> default_gamma_grid(double t_m, int points) {
  if (points < 2) throw std::invalid_argument("gamma grid needs at least 2 points");
  if (!(t_m > 0.0)) throw std::invalid_argument("gamma grid needs t_m > 0");
  const double lo = std::log(0.05);
  const double hi = std::log(10.0);
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] =
        std::exp(lo + (hi - lo) * i / (points - 1)) / t_m;
  }
  return grid;
}

std::vector<double> RunConfig::effective_gamma_grid() const {
  return gamma_grid.empty() ? default_gamma_grid(t_m) : gamma_grid;
}

void RunConfig::validate() const {
  if (experiments.empty()) throw std::invalid_argument("no experiment selected");
  if (!std::isfinite(t_m) || t_m <= 0.0) throw std::invalid_argument("t_m must be > 0");
  if (n_shots && *n_shots < 1) throw std::invalid_argument("n_shots must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  noise.validate();
  for (Experiment e : experiments) {
    if (e == Experiment::fig3_tunnel) {
      for (double g : effective_gamma_grid()) {
        if (!std::isfinite(g) || g <= 0.0) {
          throw std::invalid_argument("gamma_grid values must be finite and > 0");
        }
      }
    } else if (theta_grid.empty()) {
      throw std::invalid_argument("theta_grid must not be empty");
    }
    if (e == Experiment::custom) build_custom_protocol(*this, 0.0, PauliAxis::z);
  }
  for (double t : theta_grid) {
    if (!std::isfinite(t)) throw std::invalid_argument("theta_grid values must be finite");
  }
}

RunConfig parse_run_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  RunConfig config;
  if (root.IsNull()) return config;
  if (!root.IsMap()) throw std::invalid_argument("config must be a flat key-value mapping");

  std::optional<int> grid_points;
  for (const auto& entry : root) {
    const std::string key = entry.first.as<std::string>();
    const YAML::Node& value = entry.second;
    if (value.IsMap()) reject(key, "nested mappings are not allowed");

    if (key == "experiment") {
      config.experiments.clear();
      for (const std::string& name : string_list(value, key)) {
        const auto e = parse_experiment(name);
        if (!e) reject(key, "unknown experiment '" + name + "'");
        config.experiments.push_back(*e);
      }
    } else if (key == "theta_grid") {
      config.theta_grid = number_list(value, key);
    } else if (key == "gamma_grid") {
      config.gamma_grid = number_list(value, key);
    } else if (key == "grid_points") {
      grid_points = scalar<int>(value, key, "integer");
    } else if (key == "t_m") {
      config.t_m = scalar<double>(value, key, "number");
    } else if (key == "n_shots") {
      config.n_shots = scalar<std::int64_t>(value, key, "integer");
    } else if (key == "rng_seed") {
      config.rng_seed = scalar<std::uint64_t>(value, key, "unsigned integer");
    } else if (key == "threads") {
      config.threads = scalar<unsigned>(value, key, "unsigned integer");
    } else if (key == "nuclear_dephasing_time") {
      if (value.IsNull()) {
        config.noise.nuclear_dephasing_time.reset();
      } else {
        config.noise.nuclear_dephasing_time = scalar<double>(value, key, "number");
      }
    } else if (key == "readout_false_negative") {
      config.noise.readout_false_negative = scalar<double>(value, key, "number");
    } else if (key == "readout_false_positive") {
      config.noise.readout_false_positive = scalar<double>(value, key, "number");
    } else if (key == "output_dir") {
      config.output_dir = scalar<std::string>(value, key, "string");
    } else if (key == "emit_svg") {
      config.emit_svg = scalar<bool>(value, key, "boolean");
    } else if (key == "custom_initial") {
      config.custom_initial = scalar<std::string>(value, key, "string");
    } else if (key == "custom_steps") {
      config.custom_steps = string_list(value, key);
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  if (grid_points) {
    if (root["theta_grid"]) reject("grid_points", "conflicts with an explicit theta_grid");
    config.theta_grid = default_theta_grid(*grid_points);
    if (config.gamma_grid.empty()) {
      config.gamma_grid = default_gamma_grid(config.t_m, *grid_points);
    }
  }
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

Protocol build_custom_protocol(const RunConfig& config, double theta, PauliAxis axis) {
  Protocol protocol;
  if (config.custom_initial == "superposition_x") {
    protocol.initial = NuclearPreparation::superposition_x;
  } else if (config.custom_initial == "up") {
    protocol.initial = NuclearPreparation::up;
  } else if (config.custom_initial == "down") {
    protocol.initial = NuclearPreparation::down;
  } else {
    throw std::invalid_argument("custom_initial: unknown preparation '" +
                                config.custom_initial + "'");
  }
  if (config.custom_steps.empty()) {
    throw std::invalid_argument("custom experiment needs a non-empty custom_steps list");
  }
  for (const std::string& line : config.custom_steps) {
    const auto words = split_words(line);
    if (words.empty()) throw std::invalid_argument("custom step is empty");
    if (words[0] == "pulse" && (words.size() == 3 || words.size() == 4)) {
      PulseStep step;
      if (words[1] == "nu_e1") {
        step.pulse.frequency = Frequency::nu_e1;
      } else if (words[1] == "nu_e2") {
        step.pulse.frequency = Frequency::nu_e2;
      } else if (words[1] == "nmr") {
        step.pulse.frequency = Frequency::nmr;
      } else if (words[1] == "esr_both") {
        step.pulse.frequency = Frequency::nu_e2;
        step.unconditional = true;
      } else {
        throw std::invalid_argument("custom step '" + line + "': unknown drive '" +
                                    words[1] + "'");
      }
      step.pulse.angle = words[2] == "theta" ? theta : parse_number(words[2], line);
      if (words.size() == 4) step.pulse.phase = parse_number(words[3], line);
      protocol.steps.emplace_back(step);
    } else if (words[0] == "readout" && (words.size() == 2 || words.size() == 3)) {
      ReadoutStep step;
      if (words[1] == "no_blip") {
        step.keep = KeepBranch::no_blip;
      } else if (words[1] == "blip") {
        step.keep = KeepBranch::blip;
      } else if (words[1] == "both") {
        step.keep = KeepBranch::both;
      } else {
        throw std::invalid_argument("custom step '" + line + "': unknown branch '" +
                                    words[1] + "'");
      }
      step.model = TunnelModel::projective(config.t_m);
      if (words.size() == 3) step.model.gamma_up_out = parse_number(words[2], line);
      protocol.steps.emplace_back(step);
    } else {
      throw std::invalid_argument("custom step '" + line +
                                  "': expected 'pulse <drive> <angle> [phase]' or "
                                  "'readout <branch> [gamma]'");
    }
  }
  protocol.steps.emplace_back(TomographyStep{axis});
  protocol.validate();
  return protocol;
}

}  // namespace weakmeas
