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

// Analytic measurement protocols on the electron-nuclear pair: weak nuclear
// measurements via conditional ESR rotations, weak electron measurements via
// a finite spin-dependent tunnelling window, and the derived estimators.

#pragma once

#include <span>
#include <stdexcept>

#include "weakmeas/spinsys.hpp"

namespace weakmeas {

// Branches with probability below this are treated as impossible.
inline constexpr double kImpossibleBranchTol = 1e-15;

class ImpossibleBranch : public std::domain_error {
 public:
  explicit ImpossibleBranch(double probability);
  double probability() const { return probability_; }

 private:
  double probability_;
};

struct PostSelectedState {
  NuclearState state;
  double success_probability;
};

// Readout-window physics. Rates in 1/ms, times in ms.
struct TunnelModel {
  double gamma_up_out = 1.0;
  double t_m = 1.5;
  double gamma_down_out = 0.0;
  // Classification errors; only the Monte Carlo sampler applies them.
  double readout_false_negative = 0.0;
  double readout_false_positive = 0.0;

  void validate() const;
  // Probability that an up (down) electron has not tunnelled by t_m.
  double up_retention() const;
  double down_retention() const;

  // Gamma * t_m = 1000, so the up retention underflows to exactly zero.
  static TunnelModel projective(double t_m = 1.0);
};

struct TomographyResult {
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  double sigma_z = 0.0;

  double component(PauliAxis axis) const;
};

enum class ElectronOutcome { down, up };
enum class ReadoutOutcome { no_blip, blip };

// Conditional ESR rotation followed by a projective electron measurement;
// the electron is traced out of the post-selected state.
PostSelectedState weak_nuclear_measure(const JointState& state,
                                       const RotationPulse& pulse,
                                       ElectronOutcome outcome);

// Same rotation with the electron traced out without conditioning.
NuclearState unconditional_nuclear_channel(const JointState& state,
                                           const RotationPulse& pulse);

struct SequenceStep {
  double angle = 0.0;
  Frequency frequency = Frequency::nu_e2;
};

// Closed form for a chain of conditional rotations, each followed by a
// down outcome, starting from the x-superposition nuclear state. Each pulse
// scales the amplitude of the nuclear state it is conditioned on by
// cos(angle/2).
PostSelectedState closed_form_sequence(std::span<const SequenceStep> steps);
// Success probability of the same chain without building the state.
double closed_form_sequence_probability(std::span<const SequenceStep> steps);

// [1 + cos(theta/2)^(2n)] / 2 for n same-frequency weak measurements.
double success_probability_n(double theta, int n);
// cos^2(theta/2): theta on nu_e2 followed by theta on nu_e1.
double reversal_success_probability(double theta);

struct ReadoutProbabilities {
  double no_blip = 1.0;
  double blip = 0.0;
};

ReadoutProbabilities readout_probabilities(const JointState& state,
                                           const TunnelModel& model);

// One tunnelling readout window. no_blip applies the Kraus operator
// I (x) diag(exp(-G_up t/2), exp(-G_down t/2)); blip keeps the tunnelled
// populations. In both cases the electron is traced out and the returned
// nuclear state is the one a reloaded |down> electron would see.
PostSelectedState weak_electron_window(const JointState& state,
                                       const TunnelModel& model,
                                       ReadoutOutcome outcome);

// <sigma_z> of the nucleus after theta on nu_e2 from the x-superposition and
// a no-blip window.
double sigma_z_noblip(double theta, const TunnelModel& model);

struct TunnelTimeEstimate {
  enum class Status {
    ok,
    too_weak,    // sigma_z >= 0: no information, tunnel time unbounded
    projective,  // sigma_z <= -1: tunnel time indistinguishable from zero
  };
  Status status = Status::ok;
  double inv_gamma = 0.0;  // ms; +inf for too_weak, 0 for projective

  bool ok() const { return status == Status::ok; }
};

// Inverts sigma_z_noblip at theta = pi for 1/Gamma_up.
TunnelTimeEstimate extract_tunnel_rate(double sigma_z, double t_m);

TomographyResult tomography_expectations(const NuclearState& state);

// Bell state, unconditional electron rotation by theta, post-select the
// electron on down, nuclear tomography.
TomographyResult steering_scan(double theta);
// The post-selected nuclear state behind steering_scan.
PostSelectedState steering_state(double theta);

}  // namespace weakmeas
