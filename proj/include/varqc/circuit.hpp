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

#ifndef VARQC_CIRCUIT_HPP_
#define VARQC_CIRCUIT_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "varqc/state.hpp"

namespace varqc {

struct ParamEntry {
  std::string name;
  std::optional<double> value;
};

// Ordered gate list plus a table of free parameters. Evaluation resolves
// each parametrized gate's angle as param_scale * value, taking values
// either from an explicit vector (one entry per table row, in order) or
// from the stored bindings.
struct Circuit {
  int n = 0;
  std::vector<Gate> gates;
  std::vector<ParamEntry> params;

  int param_index(const std::string& name) const;  // -1 if absent
  void bind(const std::string& name, double value);
  // Stored bindings in table order; throws if any is unset.
  std::vector<double> bound_values() const;
};

// Structural checks: qubit indices in range and distinct, generator sizes
// match n, every referenced parameter exists. Throws std::invalid_argument.
void validate_circuit(const Circuit& c);

StateVector evaluate_circuit(const Circuit& c, std::span<const double> values,
                             const StateVector& psi0);
StateVector evaluate_circuit(const Circuit& c, const StateVector& psi0);

// Full circuit unitary by column evaluation; subject to the dense cap.
Eigen::MatrixXcd circuit_unitary(const Circuit& c,
                                 std::span<const double> values);
Eigen::MatrixXcd circuit_unitary(const Circuit& c);

// True iff every pair of terms commutes, in which case exp(-i t H) splits
// exactly into per-term rotations.
bool mutually_commuting(const PauliSum& h);

// Alternating rounds exp(-i beta_j H_d) exp(-i gamma_j H_p), round 1
// applied first. Parameters gamma_<j>, beta_<j> (1-based) are bound to the
// given values. Commuting sums compile to per-term rotations with doubled
// scale (the rotation convention carries a half-angle); non-commuting sums
// become one exact dense exponential block each. Emits a warning on
// stderr when H_d commutes with H_p, since the ansatz then never leaves
// the initial eigenbasis.
Circuit build_qaoa(const PauliSum& h_p, const PauliSum& h_d, int p,
                   std::span<const double> betas,
                   std::span<const double> gammas);

// L layers of per-qubit Y rotations followed by a CZ ladder on neighbor
// pairs. Parameters theta_<layer>_<qubit>, n*L in total, bound to params.
Circuit build_hardware_efficient(int n, int layers,
                                 std::span<const double> params);

// Fixed 4-qubit demo circuit with a single parameter `theta`. The output
// family is cos(theta/2)|0010> + sin(theta/2)|1101> under the
// qubit-0-most-significant labeling.
Circuit build_h2_circuit(double theta);

// JSON schema: {n, gates: [...], params: [{name, value?} | "name"]};
// round-trips losslessly including bindings and scales.
nlohmann::json circuit_to_json(const Circuit& c);
Circuit circuit_from_json(const nlohmann::json& j);

}  // namespace varqc

#endif  // VARQC_CIRCUIT_HPP_
