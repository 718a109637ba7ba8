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

#include "weakmeas/spinsys.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace weakmeas {

namespace {

constexpr Complex kI{0.0, 1.0};

CMatrix projector(int index) {
  CMatrix::Storage m = CMatrix::Storage::Zero(2, 2);
  m(index, index) = 1.0;
  return CMatrix(std::move(m));
}

// Nuclear index 0 is Up, 1 is Down. Electron index 0 is up, 1 is down.
const CMatrix& nuclear_up_projector() {
  static const CMatrix p = projector(0);
  return p;
}

const CMatrix& nuclear_down_projector() {
  static const CMatrix p = projector(1);
  return p;
}

const CMatrix& electron_down_projector() {
  static const CMatrix p = projector(1);
  return p;
}

CMatrix pauli2(PauliAxis axis) {
  switch (axis) {
    case PauliAxis::x:
      return CMatrix(2, {0.0, 1.0, 1.0, 0.0});
    case PauliAxis::y:
      return CMatrix(2, {0.0, -kI, kI, 0.0});
    case PauliAxis::z:
      return CMatrix(2, {1.0, 0.0, 0.0, -1.0});
  }
  throw std::invalid_argument("pauli: unknown axis");
}

}  // namespace

void RotationPulse::validate() const {
  if (!std::isfinite(angle) || !std::isfinite(phase)) {
    throw std::invalid_argument("RotationPulse: angle and phase must be finite");
  }
}

JointState::JointState(DensityMatrix rho) : rho_(std::move(rho)) {
  if (rho_.dim() != 4) throw std::invalid_argument("JointState: dimension must be 4");
}

NuclearState::NuclearState(DensityMatrix rho) : rho_(std::move(rho)) {
  if (rho_.dim() != 2) {
    throw std::invalid_argument("NuclearState: dimension must be 2");
  }
}

CMatrix pauli(PauliAxis axis, PauliTarget target) {
  const CMatrix p = pauli2(axis);
  switch (target) {
    case PauliTarget::nuclear_only:
      return p;
    case PauliTarget::nucleus:
      return kron(p, CMatrix::identity(2));
    case PauliTarget::electron:
      return kron(CMatrix::identity(2), p);
  }
  throw std::invalid_argument("pauli: unknown target");
}

CMatrix half_angle_rotation(double angle, double phase) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  const Complex e = std::polar(1.0, phase);
  return CMatrix(2, {c, s * std::conj(e), -s * e, c});
}

CMatrix conditional_unitary(const RotationPulse& pulse) {
  pulse.validate();
  const CMatrix r = half_angle_rotation(pulse.angle, pulse.phase);
  const CMatrix id = CMatrix::identity(2);
  switch (pulse.frequency) {
    case Frequency::nu_e2:
      return kron(nuclear_down_projector(), id) + kron(nuclear_up_projector(), r);
    case Frequency::nu_e1:
      return kron(nuclear_down_projector(), r) + kron(nuclear_up_projector(), id);
    case Frequency::nmr:
      break;
  }
  throw std::invalid_argument("conditional_unitary: NMR pulse is not an ESR drive");
}

CMatrix unconditional_unitary(const RotationPulse& pulse) {
  pulse.validate();
  const CMatrix r = half_angle_rotation(pulse.angle, pulse.phase);
  if (pulse.frequency == Frequency::nmr) return kron(r, CMatrix::identity(2));
  return kron(CMatrix::identity(2), r);
}

JointState evolve(const JointState& state, const CMatrix& unitary) {
  return JointState(DensityMatrix::normalized(
      matmul(matmul(unitary, state.mat()), adjoint(unitary))));
}

NuclearState nuclear_pure_state(NuclearPreparation prep) {
  const double h = std::numbers::sqrt2 / 2.0;
  switch (prep) {
    case NuclearPreparation::superposition_x:
      return NuclearState(DensityMatrix::from_pure({h, h}));
    case NuclearPreparation::up:
      return NuclearState(DensityMatrix::from_pure({1.0, 0.0}));
    case NuclearPreparation::down:
      return NuclearState(DensityMatrix::from_pure({0.0, 1.0}));
  }
  throw std::invalid_argument("nuclear_pure_state: unknown preparation");
}

JointState with_electron_down(const NuclearState& nucleus) {
  return JointState(kron(nucleus.mat(), electron_down_projector()));
}

JointState prepare_initial(NuclearPreparation prep) {
  return with_electron_down(nuclear_pure_state(prep));
}

JointState prepare_bell() {
  const RotationPulse pi_pulse{Frequency::nu_e2, std::numbers::pi, 0.0};
  return evolve(prepare_initial(NuclearPreparation::superposition_x),
                conditional_unitary(pi_pulse));
}

EntanglementReport is_entangled_ppt(const JointState& state) {
  const auto values =
      hermitian_eigenvalues(partial_transpose(state.mat(), Subsystem::electron));
  EntanglementReport report;
  for (double v : values) {
    if (v < 0.0) report.negativity -= v;
  }
  report.entangled = report.negativity > 1e-9;
  return report;
}

NuclearState nuclear_marginal(const JointState& state) {
  return NuclearState(
      DensityMatrix::normalized(partial_trace(state.mat(), Subsystem::electron)));
}

}  // namespace weakmeas
