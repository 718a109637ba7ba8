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

// Single-shot trajectory sampling of pulse/readout sequences.
//
// Every shot owns an independent random stream derived from (seed,
// shot_index), so ensembles are bit-identical for any thread count.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "weakmeas/protocols.hpp"

namespace weakmeas {

enum class KeepBranch { no_blip, blip, both };

struct PulseStep {
  RotationPulse pulse;
  // ESR only: drive nu_e1 and nu_e2 together (electron rotation independent
  // of the nucleus). NMR pulses are always unconditional.
  bool unconditional = false;
};

struct ReadoutStep {
  TunnelModel model;
  KeepBranch keep = KeepBranch::no_blip;
};

struct TomographyStep {
  PauliAxis axis = PauliAxis::z;
};

using ProtocolStep = std::variant<PulseStep, ReadoutStep, TomographyStep>;

struct Protocol {
  NuclearPreparation initial = NuclearPreparation::superposition_x;
  std::vector<ProtocolStep> steps;

  // Throws std::invalid_argument unless the sequence ends in exactly one
  // tomography step and every pulse and tunnel model is valid.
  void validate() const;
  std::size_t readout_count() const;
};

struct NoiseConfig {
  std::optional<double> nuclear_dephasing_time;  // ms, Gaussian T2*
  double readout_false_negative = 0.0;            // blip reported as no blip
  double readout_false_positive = 0.0;            // no blip reported as blip

  void validate() const;
};

struct ShotRecord {
  bool kept = false;
  // One entry per executed readout window; empty optional means no blip was
  // reported in that window.
  std::vector<std::optional<double>> blip_times;
  std::optional<int> nuclear_outcome;  // +1 / -1 along the tomography axis
  std::uint64_t rng_stream_id = 0;
};

struct EnsembleStats {
  std::int64_t n_total = 0;
  std::int64_t n_kept = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double success_fraction = 0.0;

  // No shot survived post-selection; mean and std_error carry no meaning.
  bool empty() const { return n_kept == 0; }
};

// Seed of the independent stream used by one shot.
std::uint64_t shot_stream_seed(std::uint64_t rng_seed, std::uint64_t shot_index);
// Seed for a named sub-experiment (sweep point, panel) under one root seed.
std::uint64_t derive_seed(std::uint64_t rng_seed, std::uint64_t tag);

// Conditional joint state of one trajectory. The sampler drives it with
// random outcomes; tests drive it with forced ones.
class Trajectory {
 public:
  explicit Trajectory(NuclearPreparation initial);
  explicit Trajectory(JointState initial) : state_(std::move(initial)) {}

  const JointState& state() const { return state_; }
  NuclearState nuclear_state() const { return nuclear_marginal(state_); }

  void apply(const PulseStep& step);
  // Same as apply() with the step unitary built by the caller.
  void apply_unitary(const CMatrix& unitary);
  ReadoutProbabilities readout_probabilities(const ReadoutStep& step) const;
  // Applies the physical (true) readout branch, reloads the electron in
  // |down> and applies dephasing for the window duration.
  void apply_readout(const ReadoutStep& step, ReadoutOutcome physical,
                     const NoiseConfig& noise);

 private:
  JointState state_;
};

ShotRecord sample_shot(const Protocol& protocol, const NoiseConfig& noise,
                       std::uint64_t rng_seed, std::uint64_t shot_index);

std::vector<ShotRecord> sample_shots(const Protocol& protocol,
                                     const NoiseConfig& noise,
                                     std::int64_t n_shots, std::uint64_t rng_seed,
                                     unsigned threads = 1);

EnsembleStats summarize(std::span<const ShotRecord> records);

EnsembleStats run_ensemble(const Protocol& protocol, const NoiseConfig& noise,
                           std::int64_t n_shots, std::uint64_t rng_seed,
                           unsigned threads = 1);

// Exact post-selected prediction for a protocol: kept probability and the
// conditional tomography expectation (absent when nothing can be kept).
// Propagates the same branch operators as the sampler, without sampling.
struct ExactPrediction {
  double kept_probability = 0.0;
  std::optional<double> expectation;
};

ExactPrediction exact_prediction(const Protocol& protocol, const NoiseConfig& noise);

struct RateEstimate {
  enum class Status { ok, no_information };
  Status status = Status::no_information;
  double inv_gamma = 0.0;  // ms
  double lower = 0.0;      // 95% likelihood-ratio interval, ms
  double upper = 0.0;
  std::int64_t n_events = 0;
  std::int64_t n_censored = 0;

  bool ok() const { return status == Status::ok; }
};

// Censored exponential MLE of the up-electron tunnel time from the blip
// times of a single-window protocol. Shots without a blip count as censored
// at t_m when they were kept and their nuclear outcome equals
// `censored_outcome` (the outcome correlated with an up electron).
RateEstimate estimate_gamma_from_blips(std::span<const ShotRecord> records,
                                       double t_m, int censored_outcome = +1);

// Gaussian T2* decay of the nuclear coherences over `duration`.
NuclearState apply_dephasing(const NuclearState& state, double duration,
                             double t2star);

}  // namespace weakmeas
