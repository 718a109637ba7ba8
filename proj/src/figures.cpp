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

#include "weakmeas/figures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <system_error>

#include <boost/math/distributions/normal.hpp>

namespace weakmeas {

namespace {

constexpr std::array<PauliAxis, 3> kAxes{PauliAxis::z, PauliAxis::x, PauliAxis::y};

std::string axis_name(PauliAxis axis) {
  switch (axis) {
    case PauliAxis::x:
      return "sigma_x";
    case PauliAxis::y:
      return "sigma_y";
    case PauliAxis::z:
      return "sigma_z";
  }
  return "sigma";
}

std::uint64_t seed_tag(Experiment e, int panel, std::size_t point) {
  return (static_cast<std::uint64_t>(e) << 48) | (static_cast<std::uint64_t>(panel) << 32) |
         static_cast<std::uint64_t>(point);
}

void fill_mc(SweepRow& row, const EnsembleStats& stats) {
  row.n_kept = stats.n_kept;
  row.n_total = stats.n_total;
  if (!stats.empty()) {
    row.mc_mean = stats.mean;
    row.mc_std_error = stats.std_error;
  }
}

std::optional<TomographyResult> closed_form_tomography(std::span<const SequenceStep> steps) {
  try {
    return tomography_expectations(closed_form_sequence(steps).state);
  } catch (const ImpossibleBranch&) {
    return std::nullopt;
  }
}

std::string sequence_title(Experiment e) {
  switch (e) {
    case Experiment::fig2_single:
      return "one weak measurement";
    case Experiment::fig2_double:
      return "two weak measurements";
    case Experiment::fig2_reversal:
      return "measurement reversal";
    default:
      return experiment_name(e).data();
  }
}

// Tomography panels (sigma_z, sigma_x, sigma_y) of a conditional pulse chain.
std::vector<Panel> sequence_panels(const RunConfig& config, Experiment chain,
                                   Experiment label, const std::string& prefix) {
  std::vector<Panel> panels;
  const std::int64_t shots = config.shots_for(label);
  for (std::size_t a = 0; a < kAxes.size(); ++a) {
    const PauliAxis axis = kAxes[a];
    Panel panel;
    panel.experiment = label;
    panel.name = prefix + axis_name(axis);
    panel.style = expectation_style(sequence_title(chain) + ": <" + axis_name(axis) + ">",
                                    "<" + axis_name(axis) + ">");
    for (std::size_t i = 0; i < config.theta_grid.size(); ++i) {
      const double theta = config.theta_grid[i];
      SweepRow row;
      row.sweep_value = theta;
      const auto steps = fig2_sequence(chain, theta);
      if (const auto tomo = closed_form_tomography(steps)) row.analytic = tomo->component(axis);
      const std::uint64_t seed =
          derive_seed(config.rng_seed, seed_tag(chain, static_cast<int>(a) + 8 * (label != chain), i));
      fill_mc(row, run_ensemble(fig2_protocol(chain, theta, axis), config.noise, shots, seed,
                                config.threads));
      panel.rows.push_back(row);
    }
    panels.push_back(std::move(panel));
  }
  return panels;
}

void sort_rows(std::vector<Panel>& panels) {
  for (Panel& p : panels) {
    std::stable_sort(p.rows.begin(), p.rows.end(), [](const SweepRow& l, const SweepRow& r) {
      return l.sweep_value < r.sweep_value;
    });
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw std::runtime_error("cannot write output file " + path.string());
}

void prepare_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string() +
                             (ec ? ": " + ec.message() : ""));
  }
}

std::vector<std::filesystem::path> write_panels(const RunConfig& config,
                                                const std::vector<Panel>& panels) {
  prepare_output_dir(config.output_dir);
  std::vector<std::filesystem::path> written;
  for (const Panel& panel : panels) {
    const auto csv = config.output_dir / (panel.file_stem() + ".csv");
    write_text(csv, sweep_csv(panel.rows, panel.sweep_name));
    written.push_back(csv);
    if (config.emit_svg) {
      const auto svg = config.output_dir / (panel.file_stem() + ".svg");
      write_text(svg, emit_plot(panel.rows, panel.style));
      written.push_back(svg);
    }
  }
  return written;
}

std::vector<Experiment> selected(const RunConfig& config, std::initializer_list<Experiment> family) {
  std::vector<Experiment> out;
  for (Experiment e : config.experiments) {
    if (std::find(family.begin(), family.end(), e) != family.end()) out.push_back(e);
  }
  return out;
}

ReadoutStep projective_no_blip() {
  return ReadoutStep{TunnelModel::projective(), KeepBranch::no_blip};
}

}  // namespace

std::string Panel::file_stem() const {
  return std::string(experiment_name(experiment)) + "_" + name;
}

std::vector<SequenceStep> fig2_sequence(Experiment experiment, double theta) {
  switch (experiment) {
    case Experiment::fig2_single:
      return {{theta, Frequency::nu_e2}};
    case Experiment::fig2_double:
      return {{theta, Frequency::nu_e2}, {theta, Frequency::nu_e2}};
    case Experiment::fig2_reversal:
      return {{theta, Frequency::nu_e2}, {theta, Frequency::nu_e1}};
    default:
      throw std::invalid_argument("fig2_sequence: not a tomography experiment");
  }
}

Protocol fig2_protocol(Experiment experiment, double theta, PauliAxis axis) {
  Protocol protocol;
  for (const SequenceStep& s : fig2_sequence(experiment, theta)) {
    protocol.steps.emplace_back(PulseStep{RotationPulse{s.frequency, s.angle, 0.0}, false});
    protocol.steps.emplace_back(projective_no_blip());
  }
  protocol.steps.emplace_back(TomographyStep{axis});
  return protocol;
}

Protocol tunnel_protocol(const TunnelModel& model) {
  Protocol protocol;
  protocol.steps.emplace_back(
      PulseStep{RotationPulse{Frequency::nu_e2, std::numbers::pi, 0.0}, false});
  protocol.steps.emplace_back(ReadoutStep{model, KeepBranch::no_blip});
  protocol.steps.emplace_back(TomographyStep{PauliAxis::z});
  return protocol;
}

Protocol steering_protocol(double theta, PauliAxis axis) {
  Protocol protocol;
  protocol.steps.emplace_back(
      PulseStep{RotationPulse{Frequency::nu_e2, std::numbers::pi, 0.0}, false});
  protocol.steps.emplace_back(PulseStep{RotationPulse{Frequency::nu_e2, theta, 0.0}, true});
  protocol.steps.emplace_back(projective_no_blip());
  protocol.steps.emplace_back(TomographyStep{axis});
  return protocol;
}

std::vector<Panel> fig2_panels(const RunConfig& config, Experiment experiment) {
  auto panels = sequence_panels(config, experiment, experiment, "");
  sort_rows(panels);
  return panels;
}

std::vector<Panel> supp_panels(const RunConfig& config, Experiment experiment) {
  std::vector<Panel> panels;
  const std::int64_t shots = config.shots_for(experiment);
  switch (experiment) {
    case Experiment::supp4_success: {
      const std::array<std::pair<Experiment, std::string>, 3> chains{{
          {Experiment::fig2_single, "single"},
          {Experiment::fig2_double, "double"},
          {Experiment::fig2_reversal, "reversal"},
      }};
      for (std::size_t c = 0; c < chains.size(); ++c) {
        Panel panel;
        panel.experiment = experiment;
        panel.name = chains[c].second;
        panel.style = probability_style("success probability: " + sequence_title(chains[c].first));
        for (std::size_t i = 0; i < config.theta_grid.size(); ++i) {
          const double theta = config.theta_grid[i];
          SweepRow row;
          row.sweep_value = theta;
          row.analytic = chains[c].first == Experiment::fig2_reversal
                             ? reversal_success_probability(theta)
                             : success_probability_n(theta, c == 0 ? 1 : 2);
          const auto stats = run_ensemble(
              fig2_protocol(chains[c].first, theta, PauliAxis::z), config.noise, shots,
              derive_seed(config.rng_seed, seed_tag(experiment, static_cast<int>(c), i)),
              config.threads);
          const double f = stats.success_fraction;
          row.mc_mean = f;
          row.mc_std_error = std::sqrt(f * (1.0 - f) / static_cast<double>(stats.n_total));
          row.n_kept = stats.n_kept;
          row.n_total = stats.n_total;
          panel.rows.push_back(row);
        }
        panels.push_back(std::move(panel));
      }
      break;
    }
    case Experiment::supp5_expectations: {
      for (auto [chain, prefix] : {std::pair{Experiment::fig2_single, "single_"},
                                   std::pair{Experiment::fig2_double, "double_"}}) {
        auto part = sequence_panels(config, chain, experiment, prefix);
        for (Panel& p : part) panels.push_back(std::move(p));
      }
      break;
    }
    case Experiment::supp6_steering: {
      for (std::size_t a = 0; a < kAxes.size(); ++a) {
        const PauliAxis axis = kAxes[a];
        Panel panel;
        panel.experiment = experiment;
        panel.name = axis_name(axis);
        panel.style = expectation_style("steering: <" + axis_name(axis) + ">",
                                        "<" + axis_name(axis) + ">");
        for (std::size_t i = 0; i < config.theta_grid.size(); ++i) {
          const double theta = config.theta_grid[i];
          SweepRow row;
          row.sweep_value = theta;
          row.analytic = steering_scan(theta).component(axis);
          fill_mc(row, run_ensemble(steering_protocol(theta, axis), config.noise, shots,
                                    derive_seed(config.rng_seed,
                                                seed_tag(experiment, static_cast<int>(a), i)),
                                    config.threads));
          panel.rows.push_back(row);
        }
        panels.push_back(std::move(panel));
      }
      break;
    }
    default:
      throw std::invalid_argument("supp_panels: not a supplementary experiment");
  }
  sort_rows(panels);
  return panels;
}

std::vector<Panel> custom_panels(const RunConfig& config) {
  std::vector<Panel> panels;
  const std::int64_t shots = config.shots_for(Experiment::custom);
  for (std::size_t a = 0; a < kAxes.size(); ++a) {
    const PauliAxis axis = kAxes[a];
    Panel panel;
    panel.experiment = Experiment::custom;
    panel.name = axis_name(axis);
    panel.style = expectation_style("custom protocol: <" + axis_name(axis) + ">",
                                    "<" + axis_name(axis) + ">");
    for (std::size_t i = 0; i < config.theta_grid.size(); ++i) {
      const double theta = config.theta_grid[i];
      const Protocol protocol = build_custom_protocol(config, theta, axis);
      SweepRow row;
      row.sweep_value = theta;
      row.analytic = exact_prediction(protocol, config.noise).expectation;
      fill_mc(row, run_ensemble(protocol, config.noise, shots,
                                derive_seed(config.rng_seed,
                                            seed_tag(Experiment::custom, static_cast<int>(a), i)),
                                config.threads));
      panel.rows.push_back(row);
    }
    panels.push_back(std::move(panel));
  }
  sort_rows(panels);
  return panels;
}

bool TunnelRatePoint::intervals_overlap() const {
  if (!blip_mle.ok() || extracted.status == TunnelTimeEstimate::Status::too_weak) return false;
  return extracted_lower <= blip_mle.upper && blip_mle.lower <= extracted_upper;
}

TunnelRatePoint tunnel_rate_point(double gamma, double t_m, std::int64_t n_shots,
                                  std::uint64_t rng_seed, const NoiseConfig& noise,
                                  unsigned threads) {
  TunnelModel model;
  model.gamma_up_out = gamma;
  model.t_m = t_m;
  model.validate();

  TunnelRatePoint point;
  point.gamma = gamma;
  point.t_m = t_m;
  point.sigma_z_analytic = sigma_z_noblip(std::numbers::pi, model);

  const auto records = sample_shots(tunnel_protocol(model), noise, n_shots, rng_seed, threads);
  point.mc = summarize(records);
  point.blip_mle = estimate_gamma_from_blips(records, t_m, +1);

  if (point.mc.empty()) {
    point.extracted = {TunnelTimeEstimate::Status::too_weak,
                       std::numeric_limits<double>::infinity()};
    point.extracted_lower = 0.0;
    point.extracted_upper = std::numeric_limits<double>::infinity();
    return point;
  }
  const double z = boost::math::quantile(boost::math::normal(), 0.975);
  point.extracted = extract_tunnel_rate(point.mc.mean, t_m);
  point.extracted_lower = extract_tunnel_rate(point.mc.mean - z * point.mc.std_error, t_m).inv_gamma;
  point.extracted_upper = extract_tunnel_rate(point.mc.mean + z * point.mc.std_error, t_m).inv_gamma;
  return point;
}

std::vector<TunnelRatePoint> fig3_points(const RunConfig& config) {
  std::vector<double> grid = config.effective_gamma_grid();
  std::sort(grid.begin(), grid.end());
  std::vector<TunnelRatePoint> points;
  const std::int64_t shots = config.shots_for(Experiment::fig3_tunnel);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    points.push_back(tunnel_rate_point(
        grid[i], config.t_m, shots,
        derive_seed(config.rng_seed, seed_tag(Experiment::fig3_tunnel, 0, i)), config.noise,
        config.threads));
  }
  return points;
}

std::string fig3_csv(const std::vector<TunnelRatePoint>& points) {
  std::string out =
      "gamma,gamma_t_m,sigma_z_analytic,sigma_z_mc,sigma_z_mc_std_error,n_kept,n_total,"
      "inv_gamma_true,inv_gamma_extracted,inv_gamma_extracted_lower,"
      "inv_gamma_extracted_upper,inv_gamma_blip_mle,inv_gamma_blip_mle_lower,"
      "inv_gamma_blip_mle_upper,n_blips,n_censored\n";
  for (const TunnelRatePoint& p : points) {
    const bool mc = !p.mc.empty();
    const bool extracted = mc && p.extracted.ok();
    const bool mle = p.blip_mle.ok();
    const auto cell = [](bool present, double v) {
      return present ? format_real(v) : std::string();
    };
    out += format_real(p.gamma) + "," + format_real(p.gamma * p.t_m) + "," +
           format_real(p.sigma_z_analytic) + "," + cell(mc, p.mc.mean) + "," +
           cell(mc, p.mc.std_error) + "," + std::to_string(p.mc.n_kept) + "," +
           std::to_string(p.mc.n_total) + "," + format_real(p.inv_gamma_true()) + "," +
           cell(extracted, p.extracted.inv_gamma) + "," + cell(mc, p.extracted_lower) + "," +
           cell(mc, p.extracted_upper) + "," + cell(mle, p.blip_mle.inv_gamma) + "," +
           cell(mle, p.blip_mle.lower) + "," + cell(mle, p.blip_mle.upper) + "," +
           std::to_string(p.blip_mle.n_events) + "," + std::to_string(p.blip_mle.n_censored) +
           "\n";
  }
  return out;
}

std::vector<Panel> fig3_panels(const std::vector<TunnelRatePoint>& points) {
  Panel sigma;
  sigma.experiment = Experiment::fig3_tunnel;
  sigma.name = "sigma_z";
  sigma.sweep_name = "gamma";
  sigma.style = expectation_style("no-blip nuclear polarization", "<sigma_z>");
  sigma.style.x_label = "Gamma_up,out (1/ms)";
  sigma.style.log_x = true;

  Panel tunnel;
  tunnel.experiment = Experiment::fig3_tunnel;
  tunnel.name = "inv_gamma";
  tunnel.sweep_name = "gamma";
  tunnel.style.title = "tunnel time from no-blip polarization";
  tunnel.style.x_label = "Gamma_up,out (1/ms)";
  tunnel.style.y_label = "1/Gamma (ms)";
  tunnel.style.log_x = true;
  tunnel.style.y_min = 0.0;

  const double z = boost::math::quantile(boost::math::normal(), 0.975);
  for (const TunnelRatePoint& p : points) {
    SweepRow s;
    s.sweep_value = p.gamma;
    s.analytic = p.sigma_z_analytic;
    fill_mc(s, p.mc);
    sigma.rows.push_back(s);

    SweepRow t;
    t.sweep_value = p.gamma;
    t.analytic = p.inv_gamma_true();
    t.n_kept = p.mc.n_kept;
    t.n_total = p.mc.n_total;
    if (!p.mc.empty() && p.extracted.ok()) {
      t.mc_mean = p.extracted.inv_gamma;
      if (std::isfinite(p.extracted_upper)) {
        t.mc_std_error = (p.extracted_upper - p.extracted_lower) / (2.0 * z);
      }
    }
    tunnel.rows.push_back(t);
  }
  if (!points.empty()) {
    double top = 0.0;
    for (const SweepRow& r : tunnel.rows) top = std::max(top, 1.5 * r.analytic.value_or(0.0));
    tunnel.style.y_max = top;
  }
  return {sigma, tunnel};
}

std::vector<std::filesystem::path> run_fig2(const RunConfig& config) {
  config.validate();
  std::vector<Panel> panels;
  for (Experiment e : selected(config, {Experiment::fig2_single, Experiment::fig2_double,
                                        Experiment::fig2_reversal})) {
    auto part = fig2_panels(config, e);
    for (Panel& p : part) panels.push_back(std::move(p));
  }
  return write_panels(config, panels);
}

std::vector<std::filesystem::path> run_fig3(const RunConfig& config) {
  config.validate();
  if (selected(config, {Experiment::fig3_tunnel}).empty()) return {};
  const auto points = fig3_points(config);
  auto written = write_panels(config, fig3_panels(points));
  const auto csv = config.output_dir / "fig3_tunnel_rates.csv";
  write_text(csv, fig3_csv(points));
  written.push_back(csv);
  return written;
}

std::vector<std::filesystem::path> run_supp_figs(const RunConfig& config) {
  config.validate();
  std::vector<Panel> panels;
  for (Experiment e : selected(config, {Experiment::supp4_success, Experiment::supp5_expectations,
                                        Experiment::supp6_steering})) {
    auto part = supp_panels(config, e);
    for (Panel& p : part) panels.push_back(std::move(p));
  }
  return write_panels(config, panels);
}

std::vector<std::filesystem::path> run_custom(const RunConfig& config) {
  config.validate();
  if (selected(config, {Experiment::custom}).empty()) return {};
  return write_panels(config, custom_panels(config));
}

}  // namespace weakmeas
