// Copyright 2026 The varqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VARQC_PULSE_HPP_
#define VARQC_PULSE_HPP_

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "varqc/pauli.hpp"
#include "varqc/state.hpp"

namespace varqc {

// Bilinear control system H(t) = H_0 + sum_k f_k(t) H_k on [0, T], with
// piecewise-constant fields over M equal slices. Energies and times are
// dimensionless (hbar = 1).
struct ControlSystem {
  int n = 0;
  PauliSum h0;
  std::vector<PauliSum> controls;
  double T = 1.0;
  int M = 1;

  double dt() const { return T / M; }
  int num_controls() const { return static_cast<int>(controls.size()); }
};

void validate_system(const ControlSystem& sys);

// Amplitudes c[m][k], one row per slice.
struct PulseSchedule {
  Eigen::MatrixXd amplitudes;

  int slices() const { return static_cast<int>(amplitudes.rows()); }
  int num_controls() const { return static_cast<int>(amplitudes.cols()); }
};

// Shape and finiteness check against the owning system.
void validate_schedule(const ControlSystem& sys, const PulseSchedule& sched);

// H_0 + sum_k c[m][k] H_k for 0-based slice m.
PauliSum slice_hamiltonian(const ControlSystem& sys,
                           const PulseSchedule& sched, int m);

// Ordered product of exact slice exponentials, slice 1 rightmost (applied
// first). Subject to the dense cap.
Unitary propagator_piecewise(const ControlSystem& sys,
                             const PulseSchedule& sched);

// Slice-by-slice evolution of a state; same product as the propagator
// without forming the full matrix.
StateVector propagate_state(const ControlSystem& sys,
                            const PulseSchedule& sched,
                            const StateVector& psi0);

// J = <psi(T)|H_p|psi(T)>.
double pulse_objective(const ControlSystem& sys, const PulseSchedule& sched,
                       const PauliSum& h_p, const StateVector& psi0);

// Exact dJ/dc[m][k] by the adjoint method: forward states, backward
// costate, and the spectral derivative of each slice exponential.
Eigen::MatrixXd grape_gradient(const ControlSystem& sys,
                               const PulseSchedule& sched, const PauliSum& h_p,
                               const StateVector& psi0);

// Eigendecomposition of one slice generator, shared by the propagator and
// the derivative contraction.
struct HermitianEigen {
  Eigen::MatrixXcd vectors;
  Eigen::VectorXd values;
};

HermitianEigen eigen_decompose(const Eigen::MatrixXcd& herm);
// exp(-i dt A) from a precomputed decomposition.
Eigen::MatrixXcd evolution_from_eigen(const HermitianEigen& eig, double dt);
// 2 Re <chi| d/dc exp(-i dt (A + c H)) |psi> at c = 0, using the
// divided-difference (Loewner) formula with the confluent limit on
// degenerate pairs.
double exp_derivative_overlap(const HermitianEigen& eig, double dt,
                              const Eigen::MatrixXcd& h,
                              const Eigen::VectorXcd& chi,
                              const Eigen::VectorXcd& psi);

// CSV round trip: header `slice,k0,k1,...`, one row per slice, slice
// column 1-based ascending. Throws ParseError on malformed input.
PulseSchedule parse_schedule_csv(std::istream& in);
PulseSchedule parse_schedule_csv(const std::string& text);
std::string schedule_to_csv(const PulseSchedule& sched);

// JSON schema: {n, h0, controls, T, M}; each Pauli sum is an array of
// [coefficient, axes-string] pairs. Round-trips losslessly; the reader
// runs the structural validation.
nlohmann::json system_to_json(const ControlSystem& sys);
ControlSystem system_from_json(const nlohmann::json& j);

}  // namespace varqc

#endif  // VARQC_PULSE_HPP_
