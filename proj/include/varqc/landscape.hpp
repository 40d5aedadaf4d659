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

#ifndef VARQC_LANDSCAPE_HPP_
#define VARQC_LANDSCAPE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "varqc/circuit.hpp"
#include "varqc/level_maps.hpp"
#include "varqc/pauli.hpp"
#include "varqc/pulse.hpp"
#include "varqc/state.hpp"

namespace varqc {

using ScalarObjective = std::function<double(const std::vector<double>&)>;

// Central-difference gradient with step h. Throws std::runtime_error naming
// the offending component when the objective returns a non-finite value.
std::vector<double> gradient_fd(const ScalarObjective& objective,
                                const std::vector<double>& x,
                                double h = 1e-5);

// Second-order central-stencil Hessian, symmetrized as (H + H^T) / 2. The
// default step is wider than the gradient's because second differences lose
// more precision.
Eigen::MatrixXd hessian_fd(const ScalarObjective& objective,
                           const std::vector<double>& x, double h = 1e-4);

enum class CriticalPointKind { Minimum, Maximum, Saddle, Degenerate };

struct CriticalPointClass {
  CriticalPointKind classification = CriticalPointKind::Degenerate;
  std::vector<double> eigenvalues;
  double tolerance = 0;
};

// Classifies a critical point from its Hessian spectrum: minimum when every
// eigenvalue exceeds tol, maximum when every one is below -tol, saddle when
// both signs occur beyond the tolerance, degenerate otherwise. When tol is
// not given it resolves to 1e-6 * max|eigenvalue| floored at 1e-10.
CriticalPointClass classify_critical_point(
    const Eigen::MatrixXd& hess, std::optional<double> tol = std::nullopt);

struct SpectralWeight {
  double energy = 0;
  double weight = 0;
};

// Decomposes <psi|H|psi> over the eigenspaces of H: entries are (E_n, the
// squared projection of psi onto the E_n eigenspace), ascending in energy.
// Eigenvalues equal within 1e-9 are merged into one entry so the weight is
// the basis-independent projector weight.
std::vector<SpectralWeight> spectral_weights(const StateVector& psi,
                                             const PauliSum& h_p);

// A differentiable map from real parameters to an end-time unitary, the
// common footing for circuits, piecewise-constant systems, and hybrids.
struct UnitaryFamily {
  int n = 0;
  int param_count = 0;
  std::function<Eigen::MatrixXcd(std::span<const double>)> unitary;
};

UnitaryFamily unitary_family(Circuit c);
// Parameters are the schedule amplitudes in row-major slice order, matching
// PulseSchedule layout.
UnitaryFamily unitary_family(ControlSystem sys);
UnitaryFamily unitary_family(HybridAnsatz h);

struct SurjectivityReport {
  int rank = 0;
  std::int64_t max_rank = 0;  // d^2, the real dimension of U(d)
  int param_count = 0;
};

// Rank of the real Jacobian of the vectorized end-time unitary with respect
// to all parameters (each complex entry contributes two real rows), by
// central differences with step h and singular values thresholded at
// 1e-7 * sigma_max. Registers above n_cap qubits are rejected with
// ResourceLimitError since the Jacobian has 2 * 4^n rows.
SurjectivityReport local_surjectivity_rank(const UnitaryFamily& family,
                                           std::span<const double> params,
                                           double h = 1e-5, int n_cap = 4);

struct VarianceSample {
  int n = 0;
  int sample = 0;
  double grad_component = 0;  // dJ/d(theta_1) by central differences
  double objective = 0;
  double grad_norm = 0;  // full-gradient norm, kept for diagnostics
};

struct VariancePoint {
  int n = 0;
  double variance = 0;
};

struct VarianceScanResult {
  std::vector<VarianceSample> samples;
  std::vector<VariancePoint> per_n;
};

// Samples uniform parameter vectors in [0, 2pi)^P for each register size
// and reports the sample variance of dJ/d(theta_1), the conventional
// flat-landscape diagnostic. Each sample owns a generator derived from
// (seed, n, sample index), so results are identical regardless of
// evaluation order. Requires at least 30 samples and one parameter.
VarianceScanResult gradient_variance_scan(
    const std::function<Circuit(int)>& builder,
    const std::function<PauliSum(int)>& problem, std::span<const int> ns,
    int samples, std::uint64_t seed, double fd_step = 1e-5);

}  // namespace varqc

#endif  // VARQC_LANDSCAPE_HPP_
