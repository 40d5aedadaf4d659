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

#ifndef VARQC_STATE_HPP_
#define VARQC_STATE_HPP_

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "varqc/pauli.hpp"

namespace varqc {

inline constexpr double kNormTol = 1e-10;

// Normalized amplitude vector over n qubits. Index bit (n-1-q) carries
// qubit q, so qubit 0 is the most significant bit, matching the tensor
// ordering used by the Pauli module. Global phase is kept as-is.
struct StateVector {
  int n = 0;
  Eigen::VectorXcd amps;

  std::int64_t dim() const { return amps.size(); }
};

// Validating constructor; throws if the dimension is not 2^n or the norm
// deviates from 1 by more than kNormTol.
StateVector make_state(int n, Eigen::VectorXcd amps);
StateVector basis_state(int n, std::uint64_t index);
StateVector zero_state(int n);
// |+...+>, the uniform superposition.
StateVector plus_state(int n);

struct Unitary {
  int n = 0;
  Eigen::MatrixXcd matrix;
};

bool is_unitary(const Eigen::MatrixXcd& m, double tol = 1e-9);

enum class GateKind { H, X, CZ, PauliRotation, PauliSumExp };

// One circuit element. PauliRotation applies exp(-i*angle/2 * generator);
// PauliSumExp applies exp(-i*angle * hamiltonian) exactly (dense), which
// lets a builder realize the exponential of a non-commuting sum as one
// block. If `param` is set the gate is free and the effective angle is
// param_scale * binding, supplied at evaluation time.
struct Gate {
  GateKind kind = GateKind::H;
  std::vector<int> qubits;
  double angle = 0.0;
  std::optional<std::string> param;
  double param_scale = 1.0;
  std::optional<PauliString> generator;
  std::optional<PauliSum> hamiltonian;

  static Gate h(int q);
  static Gate x(int q);
  static Gate cz(int a, int b);
  static Gate rotation(PauliString gen, double angle);
  static Gate rotation(PauliString gen, std::string param, double scale = 1.0);
  static Gate sum_exp(PauliSum h, double angle);
  static Gate sum_exp(PauliSum h, std::string param, double scale = 1.0);

  bool is_parametrized() const { return param.has_value(); }
};

// Applies a fully bound gate. Throws std::invalid_argument on a free gate
// or on qubit indices outside the state.
StateVector apply_gate(const StateVector& state, const Gate& g);
// Same, with the effective angle supplied explicitly (used by circuit
// evaluation after resolving parameter bindings).
StateVector apply_gate(const StateVector& state, const Gate& g, double angle);

// P|psi> for a Pauli string: a signed-permutation pass, no matrices.
StateVector apply_pauli(const StateVector& state, const PauliString& p);

// <psi|H|psi>. The imaginary residue must be below 1e-10; it is checked
// and discarded.
double expectation(const StateVector& state, const PauliSum& h);

// exp(-iHt)|psi> by Hermitian eigendecomposition (hbar = 1 throughout).
StateVector evolve_const(const StateVector& state, const PauliSum& h, double t);

// exp(-iHt) as a dense matrix; subject to the dense qubit cap.
Eigen::MatrixXcd evolution_operator(const PauliSum& h, double t);
Eigen::MatrixXcd evolution_operator(const Eigen::MatrixXcd& herm, double t);

// Mean of `shots` independent +-1 samples with P(+1) = (1 + <P>)/2,
// deterministic for a fixed seed.
double measure_shots(const StateVector& state, const PauliString& p,
                     std::int64_t shots, std::uint64_t seed);

// JSON encoding of the amplitudes: an array of [re, im] pairs in basis
// order. The qubit count is inferred from the length on read.
nlohmann::json state_to_json(const StateVector& state);
StateVector state_from_json(const nlohmann::json& j);

}  // namespace varqc

#endif  // VARQC_STATE_HPP_
