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

// Donor electron-nuclear spin pair.
//
// Basis order of every 4x4 operator: |Up,up>, |Up,down>, |Down,up>,
// |Down,down>, nucleus first. Nuclear 2x2 operators use (Up, Down) and
// electron 2x2 operators use (up, down).

#pragma once

#include "weakmeas/qmath.hpp"

namespace weakmeas {

// nu_e1 rotates the electron only when the nucleus is Down, nu_e2 only when
// it is Up. nmr drives the nucleus.
enum class Frequency { nu_e1, nu_e2, nmr };

struct RotationPulse {
  Frequency frequency = Frequency::nu_e2;
  double angle = 0.0;  // radians
  double phase = 0.0;  // rotation-axis azimuth, radians

  void validate() const;
  bool is_esr() const { return frequency != Frequency::nmr; }
};

enum class PauliAxis { x, y, z };
// nucleus / electron embed into the joint space, nuclear_only is 2x2.
enum class PauliTarget { nucleus, electron, nuclear_only };

class JointState {
 public:
  explicit JointState(DensityMatrix rho);
  explicit JointState(CMatrix mat) : JointState(DensityMatrix(std::move(mat))) {}
  const DensityMatrix& rho() const { return rho_; }
  const CMatrix& mat() const { return rho_.mat(); }

 private:
  DensityMatrix rho_;
};

class NuclearState {
 public:
  explicit NuclearState(DensityMatrix rho);
  explicit NuclearState(CMatrix mat)
      : NuclearState(DensityMatrix(std::move(mat))) {}
  const DensityMatrix& rho() const { return rho_; }
  const CMatrix& mat() const { return rho_.mat(); }

 private:
  DensityMatrix rho_;
};

CMatrix pauli(PauliAxis axis, PauliTarget target);

// Spin-1/2 rotation by `angle` (half angles in the entries) about an
// equatorial axis set by `phase`. In (high, low) ordering:
//   [[cos(a/2),              sin(a/2) e^{-i phase}],
//    [-sin(a/2) e^{i phase}, cos(a/2)            ]]
// so |low> -> cos(a/2)|low> + sin(a/2) e^{i phase}|high>.
CMatrix half_angle_rotation(double angle, double phase);

// Electron rotation conditioned on the nuclear state selected by the
// ESR frequency. Rejects NMR pulses.
CMatrix conditional_unitary(const RotationPulse& pulse);
// I (x) R for ESR pulses (both transitions driven), R (x) I for NMR.
CMatrix unconditional_unitary(const RotationPulse& pulse);

JointState evolve(const JointState& state, const CMatrix& unitary);

enum class NuclearPreparation { superposition_x, up, down };

NuclearState nuclear_pure_state(NuclearPreparation prep);
// Nuclear state (x) |down><down|.
JointState with_electron_down(const NuclearState& nucleus);
JointState prepare_initial(NuclearPreparation prep);
// (|down,Down> + |up,Up>)/sqrt(2).
JointState prepare_bell();

struct EntanglementReport {
  bool entangled = false;
  double negativity = 0.0;
};

// PPT test with the electron factor transposed.
EntanglementReport is_entangled_ppt(const JointState& state);

NuclearState nuclear_marginal(const JointState& state);

}  // namespace weakmeas
