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

#ifndef VARQC_DRIVER_HPP_
#define VARQC_DRIVER_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "varqc/circuit.hpp"
#include "varqc/level_maps.hpp"
#include "varqc/pauli.hpp"
#include "varqc/pulse.hpp"
#include "varqc/state.hpp"

namespace varqc {

// Shot count needed to estimate <H> to precision epsilon when H has
// Pauli 1-norm lambda: ceil(lambda^2 / epsilon^2), proportionality
// constant 1, floored at one shot. Rejects epsilon <= 0.
std::int64_t shots_required(double lambda, double epsilon);

// State-preparation fidelity when each of d state components is off by
// delta: exactly 1 / (1 + (d - 1) delta^2).
double control_precision_fidelity(std::int64_t d, double delta);

enum class ShotAllocation { Equal, Weighted };

// Shot-sampled estimation settings. Either epsilon (translated through
// shots_required and split across terms) or an explicit per-term shot
// count must be set. Equal allocation gives every term the same budget;
// Weighted splits proportionally to |alpha_j|.
struct SampledMode {
  std::optional<double> epsilon;
  std::optional<std::int64_t> shots_per_term;
  std::uint64_t seed = 0;
  ShotAllocation allocation = ShotAllocation::Equal;
};

// What to minimize: <psi(params)|h_p|psi(params)> from the fixed initial
// state, exactly or from simulated measurement shots.
struct ObjectiveSpec {
  PauliSum h_p;
  StateVector psi0;
  std::optional<SampledMode> sampled;

  bool exact() const { return !sampled.has_value(); }
};

enum class ParamKind { Angle, Amplitude };

// A parametrized state-preparation map, the common interface the
// optimizer drives. Implementations exist for circuits, piecewise
// pulse systems, and hybrid ansaetze.
class ParametrizedState {
 public:
  virtual ~ParametrizedState() = default;
  virtual int n() const = 0;
  virtual int param_count() const = 0;
  virtual ParamKind kind(int i) const = 0;
  virtual StateVector evaluate(const StateVector& psi0,
                               std::span<const double> params) const = 0;
  // Analytic gradient of the exact expectation, when the family has one.
  virtual std::optional<std::vector<double>> analytic_gradient(
      const PauliSum& h_p, const StateVector& psi0,
      std::span<const double> params) const {
    (void)h_p;
    (void)psi0;
    (void)params;
    return std::nullopt;
  }
};

class CircuitState final : public ParametrizedState {
 public:
  explicit CircuitState(Circuit c);
  int n() const override { return circuit_.n; }
  int param_count() const override {
    return static_cast<int>(circuit_.params.size());
  }
  ParamKind kind(int) const override { return ParamKind::Angle; }
  StateVector evaluate(const StateVector& psi0,
                       std::span<const double> params) const override;
  const Circuit& circuit() const { return circuit_; }

 private:
  Circuit circuit_;
};

// Parameters are the schedule amplitudes in row-major slice order.
class PulseState final : public ParametrizedState {
 public:
  explicit PulseState(ControlSystem sys);
  int n() const override { return sys_.n; }
  int param_count() const override { return sys_.M * sys_.num_controls(); }
  ParamKind kind(int) const override { return ParamKind::Amplitude; }
  StateVector evaluate(const StateVector& psi0,
                       std::span<const double> params) const override;
  std::optional<std::vector<double>> analytic_gradient(
      const PauliSum& h_p, const StateVector& psi0,
      std::span<const double> params) const override;
  const ControlSystem& system() const { return sys_; }

 private:
  PulseSchedule to_schedule(std::span<const double> params) const;
  ControlSystem sys_;
};

class HybridState final : public ParametrizedState {
 public:
  explicit HybridState(HybridAnsatz h);
  int n() const override { return ansatz_.n; }
  int param_count() const override { return ansatz_.param_count(); }
  ParamKind kind(int i) const override {
    return kinds_[static_cast<std::size_t>(i)];
  }
  StateVector evaluate(const StateVector& psi0,
                       std::span<const double> params) const override;
  std::optional<std::vector<double>> analytic_gradient(
      const PauliSum& h_p, const StateVector& psi0,
      std::span<const double> params) const override;
  const HybridAnsatz& ansatz() const { return ansatz_; }

 private:
  HybridAnsatz ansatz_;
  std::vector<ParamKind> kinds_;
};

struct EvaluationResult {
  double j = 0;
  std::int64_t shots = 0;
};

// Evaluates the objective at params. Exact mode consumes no shots.
// Sampled mode measures each Pauli term independently; term j draws its
// randomness from (seed, draw, j), so distinct draw indices give
// independent noise while a repeated (draw, params) pair reproduces the
// same estimate.
EvaluationResult evaluate_objective(const ObjectiveSpec& spec,
                                    const ParametrizedState& ansatz,
                                    const std::vector<double>& params,
                                    std::uint64_t draw = 0);

enum class OptimizerMethod { GradientDescent, NelderMead };
enum class TerminalStatus { Converged, MaxIterations, Stalled };

struct OptimizerConfig {
  OptimizerMethod method = OptimizerMethod::GradientDescent;
  int max_iterations = 200;
  double initial_step = 0.1;
  double grad_tol = 1e-7;
  double j_tol = 1e-9;
  int stall_window = 5;
  double fd_step = 1e-5;
  std::optional<std::vector<double>> initial_params;
  // 0 picks the mode default: 1 restart in exact mode, 5 in sampled mode
  // because shot noise produces spurious stalls.
  int restarts = 0;
  // Worker cap for running independent restarts concurrently. Results are
  // identical for any value; each restart owns its seed streams.
  int threads = 1;
  std::uint64_t seed = 0;
  // When set, amplitude-kind parameters are projected into [-b, b] after
  // every update; angle parameters are never constrained.
  std::optional<double> amplitude_bound;
};

struct IterationRecord {
  int iter = 0;
  std::vector<double> params;
  double j = 0;
  double grad_norm = 0;  // 0 for the derivative-free simplex
  std::int64_t shots = 0;  // consumed by this iteration, gradient included
  double wall_seconds = 0;
};

struct OptimizationTrace {
  std::vector<IterationRecord> iterations;
  TerminalStatus status = TerminalStatus::MaxIterations;
  std::vector<double> best_params;
  double best_j = 0;
  std::int64_t total_shots = 0;
  int restart_index = 0;
};

const char* to_string(TerminalStatus status);

// Runs the configured optimizer from each restart's starting point and
// returns the trace of the restart with the lowest terminal J (ties keep
// the earliest). Missing initial parameters are drawn per restart from
// [0, 2pi) for angles and [-1, 1] for amplitudes under the config seed.
// A non-finite objective value aborts the run, which keeps its partial
// trace and reports Stalled.
OptimizationTrace optimize(const ObjectiveSpec& spec,
                           const ParametrizedState& ansatz,
                           const OptimizerConfig& config = {});

}  // namespace varqc

#endif  // VARQC_DRIVER_HPP_
