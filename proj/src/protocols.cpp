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

#include "weakmeas/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace weakmeas {

namespace {

constexpr Complex kI{0.0, 1.0};

// Applies I (x) diag(up_amp, down_amp) on both sides, traces out the
// electron and renormalizes.
PostSelectedState electron_filter(const JointState& state, double up_amp,
                                  double down_amp) {
  const CMatrix filter =
      kron(CMatrix::identity(2), CMatrix(2, {up_amp, 0.0, 0.0, down_amp}));
  const CMatrix kept = matmul(matmul(filter, state.mat()), filter);
  const CMatrix nuclear = partial_trace(kept, Subsystem::electron);
  const double p = nuclear.trace().real();
  if (!(p >= kImpossibleBranchTol)) throw ImpossibleBranch(p);
  return {NuclearState(DensityMatrix::normalized(nuclear)), std::min(p, 1.0)};
}

PostSelectedState post_select_electron(const JointState& state,
                                       ElectronOutcome outcome) {
  return outcome == ElectronOutcome::down ? electron_filter(state, 0.0, 1.0)
                                          : electron_filter(state, 1.0, 0.0);
}

void check_probability(double p, const char* what) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw std::invalid_argument(std::string("TunnelModel: ") + what +
                                " must lie in [0, 1]");
  }
}

}  // namespace

ImpossibleBranch::ImpossibleBranch(double probability)
    : std::domain_error("post-selected branch has probability " +
                        std::to_string(probability)),
      probability_(probability) {}

void TunnelModel::validate() const {
  if (!std::isfinite(gamma_up_out) || gamma_up_out <= 0.0) {
    throw std::invalid_argument("TunnelModel: gamma_up_out must be finite and > 0");
  }
  if (!std::isfinite(t_m) || t_m < 0.0) {
    throw std::invalid_argument("TunnelModel: t_m must be finite and >= 0");
  }
  if (!std::isfinite(gamma_down_out) || gamma_down_out < 0.0) {
    throw std::invalid_argument("TunnelModel: gamma_down_out must be finite and >= 0");
  }
  check_probability(readout_false_negative, "readout_false_negative");
  check_probability(readout_false_positive, "readout_false_positive");
}

double TunnelModel::up_retention() const { return std::exp(-gamma_up_out * t_m); }

double TunnelModel::down_retention() const {
  return std::exp(-gamma_down_out * t_m);
}

TunnelModel TunnelModel::projective(double t_m) {
  TunnelModel model;
  model.t_m = t_m;
  model.gamma_up_out = 1000.0 / t_m;
  return model;
}

double TomographyResult::component(PauliAxis axis) const {
  switch (axis) {
    case PauliAxis::x:
      return sigma_x;
    case PauliAxis::y:
      return sigma_y;
    case PauliAxis::z:
      return sigma_z;
  }
  return 0.0;
}

PostSelectedState weak_nuclear_measure(const JointState& state,
                                       const RotationPulse& pulse,
                                       ElectronOutcome outcome) {
  return post_select_electron(evolve(state, conditional_unitary(pulse)), outcome);
}

NuclearState unconditional_nuclear_channel(const JointState& state,
                                           const RotationPulse& pulse) {
  return nuclear_marginal(evolve(state, conditional_unitary(pulse)));
}

namespace {

struct BranchAmplitudes {
  double up = 1.0;    // accumulated cos factors on the Up amplitude
  double down = 1.0;  // and on the Down amplitude
};

BranchAmplitudes sequence_amplitudes(std::span<const SequenceStep> steps) {
  if (steps.empty()) {
    throw std::invalid_argument("closed_form_sequence: empty pulse list");
  }
  BranchAmplitudes amps;
  for (const SequenceStep& step : steps) {
    if (!std::isfinite(step.angle)) {
      throw std::invalid_argument("closed_form_sequence: non-finite angle");
    }
    const double c = std::cos(0.5 * step.angle);
    switch (step.frequency) {
      case Frequency::nu_e2:
        amps.up *= c;
        break;
      case Frequency::nu_e1:
        amps.down *= c;
        break;
      case Frequency::nmr:
        throw std::invalid_argument("closed_form_sequence: NMR pulse in ESR sequence");
    }
  }
  return amps;
}

}  // namespace

double closed_form_sequence_probability(std::span<const SequenceStep> steps) {
  const BranchAmplitudes amps = sequence_amplitudes(steps);
  return 0.5 * (amps.up * amps.up + amps.down * amps.down);
}

PostSelectedState closed_form_sequence(std::span<const SequenceStep> steps) {
  const BranchAmplitudes amps = sequence_amplitudes(steps);
  const double norm = amps.up * amps.up + amps.down * amps.down;
  const double p = 0.5 * norm;
  if (!(p >= kImpossibleBranchTol)) throw ImpossibleBranch(p);
  const double off = amps.up * amps.down / norm;
  CMatrix rho(2, {amps.up * amps.up / norm, off, off, amps.down * amps.down / norm});
  return {NuclearState(std::move(rho)), p};
}

double success_probability_n(double theta, int n) {
  if (n < 1) throw std::invalid_argument("success_probability_n: n must be >= 1");
  const double c2 = std::pow(std::cos(0.5 * theta), 2);
  return 0.5 * (1.0 + std::pow(c2, n));
}

double reversal_success_probability(double theta) {
  return std::pow(std::cos(0.5 * theta), 2);
}

ReadoutProbabilities readout_probabilities(const JointState& state,
                                           const TunnelModel& model) {
  model.validate();
  const CMatrix& rho = state.mat();
  const double p_up = rho(0, 0).real() + rho(2, 2).real();
  const double p_down = rho(1, 1).real() + rho(3, 3).real();
  const double up_loss = -std::expm1(-model.gamma_up_out * model.t_m);
  const double down_loss = -std::expm1(-model.gamma_down_out * model.t_m);
  ReadoutProbabilities out;
  out.no_blip = p_up * model.up_retention() + p_down * model.down_retention();
  out.blip = p_up * up_loss + p_down * down_loss;
  return out;
}

PostSelectedState weak_electron_window(const JointState& state,
                                       const TunnelModel& model,
                                       ReadoutOutcome outcome) {
  model.validate();
  if (outcome == ReadoutOutcome::no_blip) {
    return electron_filter(state, std::exp(-0.5 * model.gamma_up_out * model.t_m),
                           std::exp(-0.5 * model.gamma_down_out * model.t_m));
  }
  const double up_loss = -std::expm1(-model.gamma_up_out * model.t_m);
  const double down_loss = -std::expm1(-model.gamma_down_out * model.t_m);
  return electron_filter(state, std::sqrt(up_loss), std::sqrt(down_loss));
}

double sigma_z_noblip(double theta, const TunnelModel& model) {
  model.validate();
  const double c2 = std::pow(std::cos(0.5 * theta), 2);
  const double s2 = std::pow(std::sin(0.5 * theta), 2);
  const double w_up = model.up_retention();
  const double w_down = model.down_retention();
  const double up_pop = c2 * w_down + s2 * w_up;
  return (up_pop - w_down) / (up_pop + w_down);
}

TunnelTimeEstimate extract_tunnel_rate(double sigma_z, double t_m) {
  if (!std::isfinite(t_m) || t_m <= 0.0) {
    throw std::invalid_argument("extract_tunnel_rate: t_m must be finite and > 0");
  }
  if (std::isnan(sigma_z)) {
    throw std::invalid_argument("extract_tunnel_rate: sigma_z is NaN");
  }
  if (sigma_z >= 0.0) {
    return {TunnelTimeEstimate::Status::too_weak,
            std::numeric_limits<double>::infinity()};
  }
  if (sigma_z <= -1.0) return {TunnelTimeEstimate::Status::projective, 0.0};
  const double log_ratio = std::log1p(sigma_z) - std::log1p(-sigma_z);
  return {TunnelTimeEstimate::Status::ok, -t_m / log_ratio};
}

TomographyResult tomography_expectations(const NuclearState& state) {
  const CMatrix& rho = state.mat();
  TomographyResult out;
  out.sigma_z = (rho(0, 0) - rho(1, 1)).real();
  out.sigma_x = (rho(0, 1) + rho(1, 0)).real();
  out.sigma_y = (kI * (rho(0, 1) - rho(1, 0))).real();
  return out;
}

PostSelectedState steering_state(double theta) {
  const RotationPulse rotation{Frequency::nu_e2, theta, 0.0};
  return post_select_electron(evolve(prepare_bell(), unconditional_unitary(rotation)),
                              ElectronOutcome::down);
}

TomographyResult steering_scan(double theta) {
  return tomography_expectations(steering_state(theta).state);
}

}  // namespace weakmeas
