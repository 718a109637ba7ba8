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

#include "weakmeas/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/tools/roots.hpp>

namespace weakmeas {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Two independent error sources flipping the same label.
double combine_flip(double a, double b) { return 1.0 - (1.0 - a) * (1.0 - b); }

const CMatrix& electron_down_projector() {
  static const CMatrix p(2, {0.0, 0.0, 0.0, 1.0});
  return p;
}

CMatrix dephase(const CMatrix& nuclear, double factor) {
  return CMatrix(2, {nuclear(0, 0), nuclear(0, 1) * factor, nuclear(1, 0) * factor,
                     nuclear(1, 1)});
}

double dephasing_factor(const NoiseConfig& noise, double duration) {
  if (!noise.nuclear_dephasing_time) return 1.0;
  const double r = duration / *noise.nuclear_dephasing_time;
  return std::exp(-r * r);
}

CMatrix step_unitary(const PulseStep& step) {
  if (step.pulse.is_esr() && !step.unconditional) {
    return conditional_unitary(step.pulse);
  }
  return unconditional_unitary(step.pulse);
}

bool is_kept(KeepBranch keep, ReadoutOutcome reported) {
  switch (keep) {
    case KeepBranch::no_blip:
      return reported == ReadoutOutcome::no_blip;
    case KeepBranch::blip:
      return reported == ReadoutOutcome::blip;
    case KeepBranch::both:
      return true;
  }
  return false;
}

// Inverse CDF of the exponential law restricted to [0, t_m].
double truncated_exponential(double rate, double t_m, double u) {
  if (rate <= 0.0) return u * t_m;
  return -std::log1p(u * std::expm1(-rate * t_m)) / rate;
}

// Pulse unitaries are identical for every shot, so build them once.
struct CompiledProtocol {
  const Protocol& protocol;
  JointState initial;
  std::vector<CMatrix> unitaries;  // one per pulse step, in order

  explicit CompiledProtocol(const Protocol& p)
      : protocol(p), initial(prepare_initial(p.initial)) {
    for (const ProtocolStep& step : p.steps) {
      if (const auto* pulse = std::get_if<PulseStep>(&step)) {
        unitaries.push_back(step_unitary(*pulse));
      }
    }
  }
};

ShotRecord run_shot(const CompiledProtocol& compiled, const NoiseConfig& noise,
                    std::uint64_t rng_seed, std::uint64_t shot_index) {
  const Protocol& protocol = compiled.protocol;
  std::size_t next_unitary = 0;
  ShotRecord record;
  record.rng_stream_id = shot_stream_seed(rng_seed, shot_index);
  std::mt19937_64 rng(record.rng_stream_id);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  Trajectory trajectory(compiled.initial);
  for (const ProtocolStep& step : protocol.steps) {
    bool stop = false;
    std::visit(
        Overloaded{
            [&](const PulseStep&) {
              trajectory.apply_unitary(compiled.unitaries[next_unitary++]);
            },
            [&](const ReadoutStep& readout) {
              const double u_branch = uniform(rng);
              const double u_time = uniform(rng);
              const double u_spin = uniform(rng);
              const double u_error = uniform(rng);

              const ReadoutProbabilities probs =
                  trajectory.readout_probabilities(readout);
              ReadoutOutcome physical = u_branch * (probs.blip + probs.no_blip) < probs.blip
                                            ? ReadoutOutcome::blip
                                            : ReadoutOutcome::no_blip;
              if (probs.blip < kImpossibleBranchTol) physical = ReadoutOutcome::no_blip;
              if (probs.no_blip < kImpossibleBranchTol) physical = ReadoutOutcome::blip;

              const TunnelModel& model = readout.model;
              std::optional<double> blip_time;
              if (physical == ReadoutOutcome::blip) {
                const CMatrix& rho = trajectory.state().mat();
                const double p_up = rho(0, 0).real() + rho(2, 2).real();
                const double up_weight =
                    p_up * -std::expm1(-model.gamma_up_out * model.t_m);
                const bool up_tunnelled = u_spin * probs.blip < up_weight;
                blip_time = truncated_exponential(
                    up_tunnelled ? model.gamma_up_out : model.gamma_down_out, model.t_m,
                    u_time);
              }

              ReadoutOutcome reported = physical;
              if (physical == ReadoutOutcome::blip &&
                  u_error < combine_flip(model.readout_false_negative,
                                         noise.readout_false_negative)) {
                reported = ReadoutOutcome::no_blip;
                blip_time.reset();
              } else if (physical == ReadoutOutcome::no_blip &&
                         u_error < combine_flip(model.readout_false_positive,
                                                noise.readout_false_positive)) {
                reported = ReadoutOutcome::blip;
                blip_time = u_time * model.t_m;
              }
              record.blip_times.push_back(blip_time);

              if (!is_kept(readout.keep, reported)) {
                stop = true;
                return;
              }
              trajectory.apply_readout(readout, physical, noise);
            },
            [&](const TomographyStep& tomo) {
              const double u = uniform(rng);
              const double expectation =
                  tomography_expectations(trajectory.nuclear_state()).component(tomo.axis);
              const double p_plus = std::clamp(0.5 * (1.0 + expectation), 0.0, 1.0);
              record.kept = true;
              record.nuclear_outcome = u < p_plus ? +1 : -1;
            }},
        step);
    if (stop) break;
  }
  return record;
}

struct Counts {
  std::int64_t kept = 0;
  std::int64_t outcome_sum = 0;
};

EnsembleStats stats_from_counts(std::int64_t n_total, const Counts& counts) {
  EnsembleStats stats;
  stats.n_total = n_total;
  stats.n_kept = counts.kept;
  stats.success_fraction =
      n_total > 0 ? static_cast<double>(counts.kept) / static_cast<double>(n_total) : 0.0;
  if (counts.kept > 0) {
    const double n = static_cast<double>(counts.kept);
    stats.mean = static_cast<double>(counts.outcome_sum) / n;
    stats.std_error = std::sqrt(std::max(0.0, 1.0 - stats.mean * stats.mean) / n);
  }
  return stats;
}

// Calls body(begin, end, worker) over contiguous shot ranges.
template <class Body>
void for_each_chunk(std::int64_t n_shots, unsigned threads, Body&& body) {
  const std::int64_t workers =
      std::clamp<std::int64_t>(threads == 0 ? 1 : threads, 1, std::max<std::int64_t>(n_shots, 1));
  if (workers == 1) {
    body(0, n_shots, 0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (std::int64_t w = 0; w < workers; ++w) {
    const std::int64_t begin = n_shots * w / workers;
    const std::int64_t end = n_shots * (w + 1) / workers;
    pool.emplace_back([&body, begin, end, w] { body(begin, end, w); });
  }
  for (std::thread& t : pool) t.join();
}

void check_shots(std::int64_t n_shots) {
  if (n_shots < 1) throw std::invalid_argument("n_shots must be >= 1");
}

}  // namespace

void Protocol::validate() const {
  if (steps.empty() || !std::holds_alternative<TomographyStep>(steps.back())) {
    throw std::invalid_argument("Protocol: must end with a nuclear tomography step");
  }
  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    std::visit(Overloaded{[](const PulseStep& p) { p.pulse.validate(); },
                          [](const ReadoutStep& r) { r.model.validate(); },
                          [](const TomographyStep&) {
                            throw std::invalid_argument(
                                "Protocol: tomography allowed only as the final step");
                          }},
               steps[i]);
  }
}

std::size_t Protocol::readout_count() const {
  return static_cast<std::size_t>(std::count_if(steps.begin(), steps.end(), [](const auto& s) {
    return std::holds_alternative<ReadoutStep>(s);
  }));
}

void NoiseConfig::validate() const {
  if (nuclear_dephasing_time &&
      (std::isnan(*nuclear_dephasing_time) || *nuclear_dephasing_time <= 0.0)) {
    throw std::invalid_argument("NoiseConfig: nuclear_dephasing_time must be > 0");
  }
  for (double p : {readout_false_negative, readout_false_positive}) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw std::invalid_argument("NoiseConfig: readout error rates must lie in [0, 1]");
    }
  }
}

std::uint64_t shot_stream_seed(std::uint64_t rng_seed, std::uint64_t shot_index) {
  return splitmix64(splitmix64(rng_seed) ^ splitmix64(shot_index + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t rng_seed, std::uint64_t tag) {
  return splitmix64(splitmix64(rng_seed + 0x2545f4914f6cdd1dULL) ^ splitmix64(tag));
}

Trajectory::Trajectory(NuclearPreparation initial) : state_(prepare_initial(initial)) {}

void Trajectory::apply(const PulseStep& step) { apply_unitary(step_unitary(step)); }

void Trajectory::apply_unitary(const CMatrix& unitary) { state_ = evolve(state_, unitary); }

ReadoutProbabilities Trajectory::readout_probabilities(const ReadoutStep& step) const {
  return weakmeas::readout_probabilities(state_, step.model);
}

void Trajectory::apply_readout(const ReadoutStep& step, ReadoutOutcome physical,
                               const NoiseConfig& noise) {
  NuclearState nucleus = weak_electron_window(state_, step.model, physical).state;
  if (noise.nuclear_dephasing_time && step.model.t_m > 0.0) {
    nucleus = apply_dephasing(nucleus, step.model.t_m, *noise.nuclear_dephasing_time);
  }
  state_ = with_electron_down(nucleus);
}

ShotRecord sample_shot(const Protocol& protocol, const NoiseConfig& noise,
                       std::uint64_t rng_seed, std::uint64_t shot_index) {
  protocol.validate();
  noise.validate();
  return run_shot(CompiledProtocol(protocol), noise, rng_seed, shot_index);
}

std::vector<ShotRecord> sample_shots(const Protocol& protocol, const NoiseConfig& noise,
                                     std::int64_t n_shots, std::uint64_t rng_seed,
                                     unsigned threads) {
  check_shots(n_shots);
  protocol.validate();
  noise.validate();
  const CompiledProtocol compiled(protocol);
  std::vector<ShotRecord> records(static_cast<std::size_t>(n_shots));
  for_each_chunk(n_shots, threads, [&](std::int64_t begin, std::int64_t end, std::int64_t) {
    for (std::int64_t i = begin; i < end; ++i) {
      records[static_cast<std::size_t>(i)] =
          run_shot(compiled, noise, rng_seed, static_cast<std::uint64_t>(i));
    }
  });
  return records;
}

EnsembleStats summarize(std::span<const ShotRecord> records) {
  Counts counts;
  for (const ShotRecord& r : records) {
    if (r.kept && r.nuclear_outcome) {
      ++counts.kept;
      counts.outcome_sum += *r.nuclear_outcome;
    }
  }
  return stats_from_counts(static_cast<std::int64_t>(records.size()), counts);
}

EnsembleStats run_ensemble(const Protocol& protocol, const NoiseConfig& noise,
                           std::int64_t n_shots, std::uint64_t rng_seed, unsigned threads) {
  check_shots(n_shots);
  protocol.validate();
  noise.validate();
  const CompiledProtocol compiled(protocol);
  std::vector<Counts> partial(std::max(1u, threads));
  for_each_chunk(n_shots, threads, [&](std::int64_t begin, std::int64_t end, std::int64_t w) {
    Counts local;
    for (std::int64_t i = begin; i < end; ++i) {
      const ShotRecord r = run_shot(compiled, noise, rng_seed, static_cast<std::uint64_t>(i));
      if (r.kept) {
        ++local.kept;
        local.outcome_sum += *r.nuclear_outcome;
      }
    }
    partial[static_cast<std::size_t>(w)] = local;
  });
  Counts total;
  for (const Counts& c : partial) {
    total.kept += c.kept;
    total.outcome_sum += c.outcome_sum;
  }
  return stats_from_counts(n_shots, total);
}

ExactPrediction exact_prediction(const Protocol& protocol, const NoiseConfig& noise) {
  protocol.validate();
  noise.validate();
  CMatrix rho = prepare_initial(protocol.initial).mat();
  ExactPrediction out;
  for (const ProtocolStep& step : protocol.steps) {
    std::visit(
        Overloaded{
            [&](const PulseStep& pulse) {
              const CMatrix u = step_unitary(pulse);
              rho = matmul(matmul(u, rho), adjoint(u));
            },
            [&](const ReadoutStep& readout) {
              const TunnelModel& m = readout.model;
              const auto branch = [&](double up_amp, double down_amp) {
                const CMatrix k =
                    kron(CMatrix::identity(2), CMatrix(2, {up_amp, 0.0, 0.0, down_amp}));
                return partial_trace(matmul(matmul(k, rho), k), Subsystem::electron);
              };
              const CMatrix no_blip = branch(std::exp(-0.5 * m.gamma_up_out * m.t_m),
                                             std::exp(-0.5 * m.gamma_down_out * m.t_m));
              const CMatrix blip =
                  branch(std::sqrt(-std::expm1(-m.gamma_up_out * m.t_m)),
                         std::sqrt(-std::expm1(-m.gamma_down_out * m.t_m)));
              const double fn = combine_flip(m.readout_false_negative, noise.readout_false_negative);
              const double fp = combine_flip(m.readout_false_positive, noise.readout_false_positive);
              CMatrix kept(2);
              switch (readout.keep) {
                case KeepBranch::no_blip:
                  kept = no_blip * (1.0 - fp) + blip * fn;
                  break;
                case KeepBranch::blip:
                  kept = blip * (1.0 - fn) + no_blip * fp;
                  break;
                case KeepBranch::both:
                  kept = no_blip + blip;
                  break;
              }
              rho = kron(dephase(kept, dephasing_factor(noise, m.t_m)),
                         electron_down_projector());
            },
            [&](const TomographyStep& tomo) {
              const CMatrix nuclear = partial_trace(rho, Subsystem::electron);
              out.kept_probability = nuclear.trace().real();
              if (out.kept_probability >= kImpossibleBranchTol) {
                const CMatrix sigma = pauli(tomo.axis, PauliTarget::nuclear_only);
                out.expectation =
                    matmul(sigma, nuclear).trace().real() / out.kept_probability;
              }
            }},
        step);
  }
  return out;
}

RateEstimate estimate_gamma_from_blips(std::span<const ShotRecord> records, double t_m,
                                       int censored_outcome) {
  if (!std::isfinite(t_m) || t_m <= 0.0) {
    throw std::invalid_argument("estimate_gamma_from_blips: t_m must be > 0");
  }
  RateEstimate est;
  double exposure = 0.0;
  for (const ShotRecord& r : records) {
    if (r.blip_times.size() != 1) {
      throw std::invalid_argument(
          "estimate_gamma_from_blips: records must come from a single-window protocol");
    }
    if (r.blip_times.front()) {
      ++est.n_events;
      exposure += *r.blip_times.front();
    } else if (r.kept && r.nuclear_outcome == censored_outcome) {
      ++est.n_censored;
      exposure += t_m;
    }
  }
  if (est.n_events == 0 || !(exposure > 0.0)) return est;

  est.status = RateEstimate::Status::ok;
  const double k = static_cast<double>(est.n_events);
  est.inv_gamma = exposure / k;

  // Deviance of rate ratio x = lambda / lambda_hat.
  const double q = boost::math::quantile(boost::math::chi_squared(1.0), 0.95);
  const auto deviance = [k, q](double x) { return 2.0 * k * (x - 1.0 - std::log(x)) - q; };
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t iters = 200;
  const auto lo = boost::math::tools::toms748_solve(
      deviance, std::numeric_limits<double>::min(), 1.0, tol, iters);
  iters = 200;
  const auto hi = boost::math::tools::toms748_solve(deviance, 1.0, 11.0 + q, tol, iters);
  const double x_lo = 0.5 * (lo.first + lo.second);
  const double x_hi = 0.5 * (hi.first + hi.second);
  est.lower = est.inv_gamma / x_hi;
  est.upper = est.inv_gamma / x_lo;
  return est;
}

NuclearState apply_dephasing(const NuclearState& state, double duration, double t2star) {
  if (!(duration >= 0.0) || !(t2star > 0.0)) {
    throw std::invalid_argument("apply_dephasing: duration >= 0 and t2star > 0 required");
  }
  const double r = duration / t2star;
  return NuclearState(dephase(state.mat(), std::exp(-r * r)));
}

}  // namespace weakmeas
