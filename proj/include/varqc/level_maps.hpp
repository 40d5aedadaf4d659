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

#ifndef VARQC_LEVEL_MAPS_HPP_
#define VARQC_LEVEL_MAPS_HPP_

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "varqc/circuit.hpp"
#include "varqc/pulse.hpp"

namespace varqc {

// First-order product-formula compilation of a piecewise-constant
// evolution into rotation gates: per slice, r repetitions of per-term
// rotations exp(-i (dt/r) alpha_j P_j) in canonical term order, slice 1
// first. Exact when slice terms mutually commute; otherwise the error
// falls off as 1/r.
Circuit digitize(const ControlSystem& sys, const PulseSchedule& sched, int r);

// A Hamiltonian that generates the gate: exp(-i generator tau) equals
// global_phase times the gate's matrix.
struct GeneratedHamiltonian {
  PauliSum generator;
  double tau = 1.0;
  std::complex<double> global_phase{1.0, 0.0};
};

// Gate-wise inverse of exponentiation. The gate must be bound; n fixes the
// embedding. Throws std::invalid_argument on free gates.
GeneratedHamiltonian generate_hamiltonian(const Gate& g, int n);

// Phase-invariant gate fidelity |tr(V† U)| / d.
double gate_overlap(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& v);

struct CircuitSegment {
  Circuit circuit;
};

// A promoted gate (or a general pulse block): the unified vector feeds
// this segment's schedule row-major (slice-major, control-minor).
struct PulseSegment {
  ControlSystem sys;
};

using HybridSegmentVariant = std::variant<CircuitSegment, PulseSegment>;

// Ordered circuit and pulse segments over one register, with a single
// flat parameter vector. Slots are assigned per segment in order; a
// parameter name shared by two circuit segments becomes two independent
// slots (disambiguated by an s<index>. prefix).
struct HybridAnsatz {
  int n = 0;
  std::vector<HybridSegmentVariant> segments;
  std::vector<std::string> param_names;
  std::vector<std::optional<double>> init;
  // Half-open slot range [offset, offset+count) per segment.
  std::vector<std::pair<int, int>> slots;

  int param_count() const { return static_cast<int>(param_names.size()); }
  // Initial unified vector; throws if any slot has no initial value.
  std::vector<double> initial_params() const;
};

// Promotes the selected gates (by index into c.gates) to pulse segments
// whose generator coefficients become free amplitudes, initialized so the
// hybrid at initial parameters reproduces the circuit up to global phase.
// Runs of unselected gates stay circuit segments. Selected gates must be
// bound (directly or via the parameter table).
HybridAnsatz hybridize(const Circuit& c, std::span<const int> selection);

StateVector evaluate_hybrid(const HybridAnsatz& h,
                            std::span<const double> params,
                            const StateVector& psi0);
Eigen::MatrixXcd hybrid_unitary(const HybridAnsatz& h,
                                std::span<const double> params);

// dJ/d(unified) for J = <psi(end)|h_p|psi(end)>: pulse slots via the
// adjoint spectral derivative, circuit slots via central differences of
// the full objective.
std::vector<double> hybrid_gradient(const HybridAnsatz& h, const PauliSum& h_p,
                                    const StateVector& psi0,
                                    std::span<const double> params,
                                    double fd_step = 1e-5);

// JSON schema: {n, segments: [{circuit: ...} | {system: ...}],
// param_names, init, slots}; segments reference the circuit and control
// system schemas. Round-trips losslessly.
nlohmann::json hybrid_to_json(const HybridAnsatz& h);
HybridAnsatz hybrid_from_json(const nlohmann::json& j);

}  // namespace varqc

#endif  // VARQC_LEVEL_MAPS_HPP_
