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

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "test_support.hpp"
#include "weakmeas/protocols.hpp"

using namespace weakmeas;
using namespace weakmeas::testing;

namespace {

const JointState kRho0Joint = prepare_initial(NuclearPreparation::superposition_x);

// Hand-expanded oracles on psi = (s, c, 0, 1)/sqrt(2) after theta on nu_e2.
CMatrix single_measure_oracle(double theta) {
  const double c = std::cos(theta / 2);
  const double n = 1 + c * c;
  return CMatrix(2, {c * c / n, c / n, c / n, 1 / n});
}

// No-blip window with up retention E on the same state.
CMatrix finite_window_oracle(double theta, double e) {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  const double up = c * c + s * s * e;
  const double n = up + 1;
  return CMatrix(2, {up / n, c / n, c / n, 1 / n});
}

JointState pulsed(double theta) {
  return evolve(kRho0Joint, conditional_unitary({Frequency::nu_e2, theta, 0.0}));
}

TunnelModel model_with(double gamma_t, double t_m = 1.5) {
  TunnelModel m;
  if (gamma_t == 0.0) {
    m.t_m = 0.0;  // rate must stay positive; an empty window has Gamma t = 0
    return m;
  }
  m.t_m = t_m;
  m.gamma_up_out = gamma_t / t_m;
  return m;
}

}  // namespace

TEST_CASE("weak_nuclear_measure examples") {
  const auto half = weak_nuclear_measure(kRho0Joint, {Frequency::nu_e2, kPi / 2, 0.0},
                                         ElectronOutcome::down);
  CHECK(half.success_probability == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(half.state.mat()(0, 0).real() == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(half.state.mat()(1, 1).real() == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(half.state.mat()(0, 1).real() == doctest::Approx(0.47140452079103).epsilon(1e-12));

  const auto zero = weak_nuclear_measure(kRho0Joint, {Frequency::nu_e2, 0.0, 0.0},
                                         ElectronOutcome::down);
  CHECK(zero.success_probability == doctest::Approx(1.0));
  CHECK(zero.state.mat().max_abs_diff(
            nuclear_pure_state(NuclearPreparation::superposition_x).mat()) < 1e-15);

  const auto pi = weak_nuclear_measure(kRho0Joint, {Frequency::nu_e2, kPi, 0.0},
                                       ElectronOutcome::down);
  CHECK(pi.success_probability == doctest::Approx(0.5));
  CHECK(pi.state.mat().max_abs_diff(CMatrix(2, {0.0, 0.0, 0.0, 1.0})) < 1e-15);

  CHECK_THROWS_AS(weak_nuclear_measure(prepare_initial(NuclearPreparation::down),
                                       {Frequency::nu_e2, 1.0, 0.0}, ElectronOutcome::up),
                  ImpossibleBranch);
  CHECK_THROWS_AS(weak_nuclear_measure(kRho0Joint, {Frequency::nmr, 1.0, 0.0},
                                       ElectronOutcome::down),
                  std::invalid_argument);
}

TEST_CASE("weak_nuclear_measure matches the hand-expanded state on a grid") {
  for (double theta : grid(0.0, 2 * kPi, 13)) {
    const auto out = weak_nuclear_measure(kRho0Joint, {Frequency::nu_e2, theta, 0.0},
                                          ElectronOutcome::down);
    CHECK(out.state.mat().max_abs_diff(single_measure_oracle(theta)) < 1e-12);
    CHECK(std::abs(purity(out.state.rho()) - 1.0) < 1e-10);
    // Both outcomes exhaust the probability.
    const double s2 = std::pow(std::sin(theta / 2), 2);
    const double p_up = s2 < 1e-14 ? 0.0
                                   : weak_nuclear_measure(kRho0Joint,
                                                            {Frequency::nu_e2, theta, 0.0},
                                                            ElectronOutcome::up)
                                           .success_probability;
    CHECK(std::abs(out.success_probability + p_up - 1.0) < 1e-12);
  }
}

TEST_CASE("unconditional_nuclear_channel examples") {
  const CMatrix half = CMatrix::identity(2) * 0.5;
  CHECK(unconditional_nuclear_channel(kRho0Joint, {Frequency::nu_e2, kPi, 0.0})
            .mat()
            .max_abs_diff(half) < 1e-15);
  CHECK(unconditional_nuclear_channel(kRho0Joint, {Frequency::nu_e2, 0.0, 0.0})
            .mat()
            .max_abs_diff(CMatrix(2, {0.5, 0.5, 0.5, 0.5})) < 1e-15);
  const double h = 0.5 * std::sqrt(0.5);
  CHECK(unconditional_nuclear_channel(kRho0Joint, {Frequency::nu_e2, kPi / 2, 0.0})
            .mat()
            .max_abs_diff(CMatrix(2, {0.5, h, h, 0.5})) < 1e-12);
}

TEST_CASE("unconditional channel leaves the nuclear populations untouched") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const JointState in(random_density(rng, 4));
    const RotationPulse pulse{trial % 2 ? Frequency::nu_e1 : Frequency::nu_e2,
                              6.0 * trial / 50, 0.4};
    const CMatrix before = nuclear_marginal(in).mat();
    const CMatrix after = unconditional_nuclear_channel(in, pulse).mat();
    CHECK(std::abs(before(0, 0) - after(0, 0)) < 1e-15);
    CHECK(std::abs(before(1, 1) - after(1, 1)) < 1e-15);
  }
}

TEST_CASE("closed_form_sequence examples") {
  for (double theta : grid(0.0, 2 * kPi, 13)) {
    if (std::abs(theta - kPi) < 1e-12) continue;
    const std::vector<SequenceStep> rev{{theta, Frequency::nu_e2}, {theta, Frequency::nu_e1}};
    CHECK(closed_form_sequence(rev).state.mat().max_abs_diff(
              nuclear_pure_state(NuclearPreparation::superposition_x).mat()) < 1e-12);
  }
  const std::vector<SequenceStep> twice{{kPi / 2, Frequency::nu_e2}, {kPi / 2, Frequency::nu_e2}};
  const auto out = closed_form_sequence(twice);
  CHECK(out.state.mat().max_abs_diff(CMatrix(2, {0.2, 0.4, 0.4, 0.8})) < 1e-12);
  const auto tomo = tomography_expectations(out.state);
  CHECK(tomo.sigma_z == doctest::Approx(-0.6));
  CHECK(tomo.sigma_x == doctest::Approx(0.8));
  CHECK(out.success_probability == doctest::Approx(0.625));

  const std::vector<SequenceStep> none{{0.0, Frequency::nu_e2}};
  CHECK(closed_form_sequence(none).state.mat().max_abs_diff(
            CMatrix(2, {0.5, 0.5, 0.5, 0.5})) < 1e-15);

  const std::vector<SequenceStep> rev_pi{{kPi, Frequency::nu_e2}, {kPi, Frequency::nu_e1}};
  CHECK_THROWS_AS(closed_form_sequence(rev_pi), ImpossibleBranch);
  CHECK(closed_form_sequence_probability(rev_pi) < 1e-30);
  CHECK_THROWS_AS(closed_form_sequence({}), std::invalid_argument);
  const std::vector<SequenceStep> nmr{{1.0, Frequency::nmr}};
  CHECK_THROWS_AS(closed_form_sequence(nmr), std::invalid_argument);
}

TEST_CASE("closed form agrees with step-by-step 4-dim simulation") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
  std::uniform_int_distribution<int> length(1, 4);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SequenceStep> steps(static_cast<std::size_t>(length(rng)));
    for (auto& s : steps) s = {angle(rng), coin(rng) ? Frequency::nu_e1 : Frequency::nu_e2};
    NuclearState state = nuclear_pure_state(NuclearPreparation::superposition_x);
    double p = 1.0;
    for (const auto& s : steps) {
      const auto out = weak_nuclear_measure(with_electron_down(state),
                                            {s.frequency, s.angle, 0.0}, ElectronOutcome::down);
      state = out.state;
      p *= out.success_probability;
    }
    const auto closed = closed_form_sequence(steps);
    CHECK(closed.state.mat().max_abs_diff(state.mat()) < 1e-12);
    CHECK(std::abs(closed.success_probability - p) < 1e-12);
  }
}

TEST_CASE("success probabilities") {
  CHECK(success_probability_n(0.0, 1) == 1.0);
  CHECK(success_probability_n(0.0, 5) == 1.0);
  CHECK(success_probability_n(kPi, 1) == doctest::Approx(0.5));
  CHECK(success_probability_n(kPi / 2, 2) == doctest::Approx(0.625));
  CHECK(reversal_success_probability(0.0) == 1.0);
  CHECK(reversal_success_probability(kPi) < 1e-30);
  CHECK(reversal_success_probability(kPi / 2) == doctest::Approx(0.5));
  CHECK_THROWS_AS(success_probability_n(1.0, 0), std::invalid_argument);

  // Chained conditional probabilities.
  for (double theta : grid(0.0, 2 * kPi, 13)) {
    for (int n : {1, 2, 3}) {
      std::vector<SequenceStep> steps(static_cast<std::size_t>(n), {theta, Frequency::nu_e2});
      CHECK(std::abs(closed_form_sequence_probability(steps) - success_probability_n(theta, n)) <
            1e-12);
    }
    const std::vector<SequenceStep> rev{{theta, Frequency::nu_e2}, {theta, Frequency::nu_e1}};
    CHECK(std::abs(closed_form_sequence_probability(rev) -
                   reversal_success_probability(theta)) < 1e-12);
  }
}

TEST_CASE("weak_electron_window examples") {
  const JointState bell = prepare_bell();
  const auto strong = weak_electron_window(bell, TunnelModel::projective(), ReadoutOutcome::no_blip);
  CHECK(strong.success_probability == doctest::Approx(0.5));
  CHECK(strong.state.mat().max_abs_diff(CMatrix(2, {0.0, 0.0, 0.0, 1.0})) < 1e-15);

  TunnelModel off = model_with(1.0);
  off.t_m = 0.0;
  const auto none = weak_electron_window(bell, off, ReadoutOutcome::no_blip);
  CHECK(none.success_probability == doctest::Approx(1.0));
  CHECK(tomography_expectations(none.state).sigma_z == doctest::Approx(0.0));
  CHECK_THROWS_AS(weak_electron_window(bell, off, ReadoutOutcome::blip), ImpossibleBranch);

  const auto finite = weak_electron_window(pulsed(kPi / 2), model_with(1.0),
                                           ReadoutOutcome::no_blip);
  CHECK(tomography_expectations(finite.state).sigma_z ==
        doctest::Approx(-0.18769097).epsilon(1e-7));

  // Blip on the Bell state heralds the Up nucleus.
  const auto blip = weak_electron_window(bell, model_with(1.0), ReadoutOutcome::blip);
  CHECK(blip.state.mat().max_abs_diff(CMatrix(2, {1.0, 0.0, 0.0, 0.0})) < 1e-15);
  CHECK(blip.success_probability == doctest::Approx(0.5 * (1 - std::exp(-1.0))));
}

TEST_CASE("finite window states match the hand expansion and lose purity") {
  for (double theta : grid(0.0, 2 * kPi, 13)) {
    for (double gamma_t : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0}) {
      const TunnelModel model = model_with(gamma_t);
      const JointState in = pulsed(theta);
      const auto no = weak_electron_window(in, model, ReadoutOutcome::no_blip);
      const double e = std::exp(-gamma_t);
      CHECK(no.state.mat().max_abs_diff(finite_window_oracle(theta, e)) < 1e-12);
      const auto probs = readout_probabilities(in, model);
      CHECK(std::abs(probs.no_blip - no.success_probability) < 1e-12);
      CHECK(std::abs(probs.no_blip + probs.blip - 1.0) < 1e-12);
      const double s2 = std::pow(std::sin(theta / 2), 2);
      // det of the oracle is s^2 E / n^2: mixed exactly when s^2 E > 0.
      if (e * s2 > 1e-6) CHECK(purity(no.state.rho()) < 1.0);
      if (s2 < 1e-20) CHECK(std::abs(purity(no.state.rho()) - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("sigma_z_noblip examples and monotonicity") {
  CHECK(sigma_z_noblip(kPi, model_with(std::log(3.0))) == doctest::Approx(-0.5).epsilon(1e-14));
  TunnelModel zero = model_with(1.0);
  zero.t_m = 0.0;
  CHECK(sigma_z_noblip(kPi, zero) == 0.0);
  CHECK(sigma_z_noblip(0.0, model_with(2.0)) == 0.0);
  CHECK(sigma_z_noblip(kPi / 2, model_with(1.0)) == doctest::Approx(-0.18769097).epsilon(1e-7));

  double prev = 0.0;
  for (double gamma_t : grid(0.01, 20.0, 200)) {
    const double s = sigma_z_noblip(kPi, model_with(gamma_t));
    CHECK(s < prev);
    CHECK(s > -1.0);
    prev = s;
  }
  // Agrees with the window on the pulsed state.
  for (double theta : grid(0.0, 2 * kPi, 13)) {
    const auto out = weak_electron_window(pulsed(theta), model_with(0.7), ReadoutOutcome::no_blip);
    CHECK(std::abs(tomography_expectations(out.state).sigma_z -
                   sigma_z_noblip(theta, model_with(0.7))) < 1e-12);
  }
}

TEST_CASE("extract_tunnel_rate examples") {
  const auto r = extract_tunnel_rate(-0.5, 1.5);
  CHECK(r.ok());
  CHECK(r.inv_gamma == doctest::Approx(1.5 / std::log(3.0)).epsilon(1e-14));
  CHECK(r.inv_gamma == doctest::Approx(1.3653588399).epsilon(1e-10));

  const auto weak = extract_tunnel_rate(-1e-300, 1.5);
  CHECK(weak.ok());
  CHECK(weak.inv_gamma > 1e200);
  CHECK(extract_tunnel_rate(0.0, 1.5).status == TunnelTimeEstimate::Status::too_weak);
  CHECK(std::isinf(extract_tunnel_rate(0.3, 1.5).inv_gamma));
  CHECK(extract_tunnel_rate(-1.0, 1.5).status == TunnelTimeEstimate::Status::projective);
  CHECK_THROWS_AS(extract_tunnel_rate(-0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(extract_tunnel_rate(std::nan(""), 1.5), std::invalid_argument);

  for (double gamma_t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    for (double t_m : {0.5, 1.5, 4.0}) {
      const TunnelModel m = model_with(gamma_t, t_m);
      const auto back = extract_tunnel_rate(sigma_z_noblip(kPi, m), t_m);
      CHECK(back.ok());
      CHECK(std::abs(back.inv_gamma * m.gamma_up_out - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("tunnel models validate") {
  TunnelModel m;
  m.gamma_up_out = 0.0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = TunnelModel{};
  m.t_m = -1.0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = TunnelModel{};
  m.readout_false_positive = 1.5;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  CHECK(TunnelModel::projective().up_retention() == 0.0);
}

TEST_CASE("tomography_expectations examples") {
  const auto r0 = tomography_expectations(nuclear_pure_state(NuclearPreparation::superposition_x));
  CHECK(r0.sigma_x == doctest::Approx(1.0));
  CHECK(r0.sigma_y == doctest::Approx(0.0));
  CHECK(r0.sigma_z == doctest::Approx(0.0));
  const auto up = tomography_expectations(nuclear_pure_state(NuclearPreparation::up));
  CHECK(up.sigma_z == 1.0);
  CHECK(up.sigma_x == 0.0);
  const auto weak = tomography_expectations(NuclearState(single_measure_oracle(kPi / 2)));
  CHECK(weak.sigma_x == doctest::Approx(0.94280904).epsilon(1e-8));
  CHECK(weak.sigma_y == doctest::Approx(0.0));
  CHECK(weak.sigma_z == doctest::Approx(-1.0 / 3).epsilon(1e-14));
  // (|Up> + i|Down>)/sqrt(2) points along +y.
  const auto y = tomography_expectations(
      NuclearState(DensityMatrix::from_pure({1.0, Complex(0.0, 1.0)})));
  CHECK(y.sigma_y == doctest::Approx(1.0));
  CHECK(y.component(PauliAxis::y) == doctest::Approx(1.0));
}

TEST_CASE("steering_scan examples") {
  const auto at0 = steering_scan(0.0);
  CHECK(at0.sigma_z == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::abs(at0.sigma_x) < 1e-15);
  const auto at90 = steering_scan(kPi / 2);
  CHECK(std::abs(std::abs(at90.sigma_x) - 1.0) < 1e-12);
  CHECK(std::abs(at90.sigma_z) < 1e-12);
  CHECK(steering_scan(kPi).sigma_z == doctest::Approx(1.0).epsilon(1e-15));
  for (double theta : grid(0.0, 2 * kPi, 41)) {
    const auto t = steering_scan(theta);
    const double norm2 = t.sigma_x * t.sigma_x + t.sigma_y * t.sigma_y + t.sigma_z * t.sigma_z;
    CHECK(std::abs(norm2 - 1.0) < 1e-10);
    // Rotating the electron by theta steers the nucleus to polar angle
    // pi - theta on the x-z great circle.
    CHECK(std::abs(t.sigma_z + std::cos(theta)) < 1e-12);
    CHECK(std::abs(std::abs(t.sigma_x) - std::abs(std::sin(theta))) < 1e-12);
    CHECK(steering_state(theta).success_probability == doctest::Approx(0.5));
  }
}
