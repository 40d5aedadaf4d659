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

#include "varqc/driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <utility>

#include "varqc/rng.hpp"

namespace varqc {

std::int64_t shots_required(double lambda, double epsilon) {
  if (!(lambda >= 0))
    throw std::invalid_argument("Pauli 1-norm must be nonnegative");
  if (!(epsilon > 0))
    throw std::invalid_argument("target precision must be positive");
  const double raw = (lambda * lambda) / (epsilon * epsilon);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(raw)));
}

double control_precision_fidelity(std::int64_t d, double delta) {
  if (d < 1) throw std::invalid_argument("dimension must be at least 1");
  if (!(delta >= 0))
    throw std::invalid_argument("per-component error must be nonnegative");
  return 1.0 / (1.0 + static_cast<double>(d - 1) * delta * delta);
}

CircuitState::CircuitState(Circuit c) : circuit_(std::move(c)) {
  validate_circuit(circuit_);
}

StateVector CircuitState::evaluate(const StateVector& psi0,
                                   std::span<const double> params) const {
  return evaluate_circuit(circuit_, params, psi0);
}

PulseState::PulseState(ControlSystem sys) : sys_(std::move(sys)) {
  validate_system(sys_);
}

PulseSchedule PulseState::to_schedule(std::span<const double> params) const {
  PulseSchedule sched;
  const int k = sys_.num_controls();
  sched.amplitudes.resize(sys_.M, k);
  for (int m = 0; m < sys_.M; ++m)
    for (int j = 0; j < k; ++j)
      sched.amplitudes(m, j) = params[static_cast<std::size_t>(m) * k + j];
  return sched;
}

StateVector PulseState::evaluate(const StateVector& psi0,
                                 std::span<const double> params) const {
  if (params.size() != static_cast<std::size_t>(param_count()))
    throw std::invalid_argument("amplitude count mismatch");
  return propagate_state(sys_, to_schedule(params), psi0);
}

std::optional<std::vector<double>> PulseState::analytic_gradient(
    const PauliSum& h_p, const StateVector& psi0,
    std::span<const double> params) const {
  const Eigen::MatrixXd g =
      grape_gradient(sys_, to_schedule(params), h_p, psi0);
  std::vector<double> flat(static_cast<std::size_t>(g.size()));
  const int k = sys_.num_controls();
  for (int m = 0; m < sys_.M; ++m)
    for (int j = 0; j < k; ++j)
      flat[static_cast<std::size_t>(m) * k + j] = g(m, j);
  return flat;
}

HybridState::HybridState(HybridAnsatz h) : ansatz_(std::move(h)) {
  for (std::size_t s = 0; s < ansatz_.segments.size(); ++s) {
    const ParamKind kind =
        std::holds_alternative<PulseSegment>(ansatz_.segments[s])
            ? ParamKind::Amplitude
            : ParamKind::Angle;
    for (int i = 0; i < ansatz_.slots[s].second; ++i) kinds_.push_back(kind);
  }
}

StateVector HybridState::evaluate(const StateVector& psi0,
                                  std::span<const double> params) const {
  return evaluate_hybrid(ansatz_, params, psi0);
}

std::optional<std::vector<double>> HybridState::analytic_gradient(
    const PauliSum& h_p, const StateVector& psi0,
    std::span<const double> params) const {
  return hybrid_gradient(ansatz_, h_p, psi0, params);
}

EvaluationResult evaluate_objective(const ObjectiveSpec& spec,
                                    const ParametrizedState& ansatz,
                                    const std::vector<double>& params,
                                    std::uint64_t draw) {
  if (params.size() != static_cast<std::size_t>(ansatz.param_count()))
    throw std::invalid_argument(
        "expected " + std::to_string(ansatz.param_count()) +
        " parameters, got " + std::to_string(params.size()));
  if (spec.psi0.n != ansatz.n() || spec.h_p.num_qubits() != ansatz.n())
    throw std::invalid_argument("objective qubit counts disagree");

  const StateVector psi = ansatz.evaluate(spec.psi0, params);
  if (spec.exact()) return {expectation(psi, spec.h_p), 0};

  const SampledMode& mode = *spec.sampled;
  const std::vector<PauliTerm>& terms = spec.h_p.terms();
  if (terms.empty()) return {0.0, 0};
  const std::size_t count = terms.size();

  std::vector<std::int64_t> alloc(count);
  if (mode.shots_per_term) {
    if (*mode.shots_per_term < 1)
      throw std::invalid_argument("per-term shot count must be positive");
    std::fill(alloc.begin(), alloc.end(), *mode.shots_per_term);
  } else {
    if (!mode.epsilon)
      throw std::invalid_argument(
          "sampled mode needs a target precision or a per-term shot count");
    const double lambda = lambda_norm(spec.h_p);
    const std::int64_t total = shots_required(lambda, *mode.epsilon);
    if (mode.allocation == ShotAllocation::Equal) {
      const std::int64_t per =
          (total + static_cast<std::int64_t>(count) - 1) /
          static_cast<std::int64_t>(count);
      std::fill(alloc.begin(), alloc.end(), per);
    } else {
      for (std::size_t j = 0; j < count; ++j)
        alloc[j] = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::ceil(
                   static_cast<double>(total) * std::abs(terms[j].coeff) /
                   lambda)));
    }
  }

  EvaluationResult out;
  for (std::size_t j = 0; j < count; ++j) {
    const double mean =
        measure_shots(psi, terms[j].string, alloc[j],
                      mix_seed(mode.seed, {draw, static_cast<std::uint64_t>(j)}));
    out.j += terms[j].coeff * mean;
    out.shots += alloc[j];
  }
  return out;
}

const char* to_string(TerminalStatus status) {
  switch (status) {
    case TerminalStatus::Converged:
      return "converged";
    case TerminalStatus::MaxIterations:
      return "max-iterations";
    case TerminalStatus::Stalled:
      return "stalled";
  }
  return "unknown";
}

namespace {

// Internal control flow: a non-finite objective aborts the run but keeps
// the partial trace.
struct NonFinite {};

class Evaluator {
 public:
  Evaluator(const ObjectiveSpec& spec, const ParametrizedState& ansatz,
            std::uint64_t draw_base)
      : spec_(spec), ansatz_(ansatz), draw_(draw_base) {}

  double operator()(const std::vector<double>& x) {
    const EvaluationResult r = evaluate_objective(spec_, ansatz_, x, draw_++);
    shots_ += r.shots;
    if (!std::isfinite(r.j)) throw NonFinite{};
    return r.j;
  }

  std::int64_t shots() const { return shots_; }

 private:
  const ObjectiveSpec& spec_;
  const ParametrizedState& ansatz_;
  std::uint64_t draw_;
  std::int64_t shots_ = 0;
};

double l2_norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void project_box(std::vector<double>& x, const ParametrizedState& ansatz,
                 const std::optional<double>& bound) {
  if (!bound) return;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (ansatz.kind(static_cast<int>(i)) == ParamKind::Amplitude)
      x[i] = std::clamp(x[i], -*bound, *bound);
}

void track_best(OptimizationTrace& trace, const std::vector<double>& x,
                double j) {
  if (trace.best_params.empty() || j < trace.best_j) {
    trace.best_params = x;
    trace.best_j = j;
  }
}

// Gradient of the optimized objective: the analytic adjoint in exact mode
// when the family provides one, central differences of the (possibly
// sampled) objective otherwise.
std::vector<double> objective_gradient(Evaluator& ev,
                                       const ObjectiveSpec& spec,
                                       const ParametrizedState& ansatz,
                                       const std::vector<double>& x,
                                       double fd_step) {
  if (spec.exact()) {
    if (std::optional<std::vector<double>> g =
            ansatz.analytic_gradient(spec.h_p, spec.psi0, x)) {
      for (double v : *g)
        if (!std::isfinite(v)) throw NonFinite{};
      return *g;
    }
  }
  std::vector<double> g(x.size());
  std::vector<double> work = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    work[i] = x[i] + fd_step;
    const double jp = ev(work);
    work[i] = x[i] - fd_step;
    const double jm = ev(work);
    work[i] = x[i];
    g[i] = (jp - jm) / (2 * fd_step);
  }
  return g;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

OptimizationTrace run_gradient_descent(const ObjectiveSpec& spec,
                                       const ParametrizedState& ansatz,
                                       const OptimizerConfig& config,
                                       std::vector<double> x, int restart) {
  OptimizationTrace trace;
  trace.restart_index = restart;
  Evaluator ev(spec, ansatz, static_cast<std::uint64_t>(restart) << 32);
  project_box(x, ansatz, config.amplitude_bound);

  try {
    double j = ev(x);
    track_best(trace, x, j);
    double step = config.initial_step;
    int stall = 0;
    std::int64_t recorded_shots = 0;
    Clock::time_point mark = Clock::now();

    for (int iter = 0;; ++iter) {
      const std::vector<double> g =
          objective_gradient(ev, spec, ansatz, x, config.fd_step);
      const double gnorm = l2_norm(g);

      IterationRecord rec;
      rec.iter = iter;
      rec.params = x;
      rec.j = j;
      rec.grad_norm = gnorm;
      rec.shots = ev.shots() - recorded_shots;
      recorded_shots = ev.shots();
      rec.wall_seconds = seconds_since(mark);
      mark = Clock::now();
      trace.iterations.push_back(std::move(rec));

      if (gnorm < config.grad_tol || stall >= config.stall_window) {
        trace.status = TerminalStatus::Converged;
        break;
      }
      if (iter >= config.max_iterations) {
        trace.status = TerminalStatus::MaxIterations;
        break;
      }

      // Backtracking line search with the Armijo sufficient-decrease rule;
      // a projected candidate falls back to plain decrease.
      bool accepted = false;
      double s = step;
      std::vector<double> cand(x.size());
      double jc = 0;
      while (s >= 1e-14) {
        bool projected = false;
        for (std::size_t i = 0; i < x.size(); ++i) cand[i] = x[i] - s * g[i];
        if (config.amplitude_bound) {
          std::vector<double> raw = cand;
          project_box(cand, ansatz, config.amplitude_bound);
          projected = cand != raw;
        }
        jc = ev(cand);
        // A projected step that holds J (an active bound) still counts as
        // progress so the stall window can declare convergence there.
        const bool enough = projected
                                ? jc <= j
                                : jc <= j - 1e-4 * s * gnorm * gnorm;
        if (enough) {
          accepted = true;
          break;
        }
        s /= 2;
      }
      if (!accepted) {
        trace.status = TerminalStatus::Stalled;
        break;
      }
      stall = std::abs(j - jc) < config.j_tol ? stall + 1 : 0;
      x = cand;
      j = jc;
      track_best(trace, x, j);
      step = 2 * s;
    }
  } catch (const NonFinite&) {
    trace.status = TerminalStatus::Stalled;
  }
  trace.total_shots = ev.shots();
  return trace;
}

OptimizationTrace run_nelder_mead(const ObjectiveSpec& spec,
                                  const ParametrizedState& ansatz,
                                  const OptimizerConfig& config,
                                  std::vector<double> x0, int restart) {
  OptimizationTrace trace;
  trace.restart_index = restart;
  Evaluator ev(spec, ansatz, static_cast<std::uint64_t>(restart) << 32);
  project_box(x0, ansatz, config.amplitude_bound);
  const std::size_t p = x0.size();

  try {
    std::vector<std::vector<double>> verts(p + 1, x0);
    for (std::size_t i = 0; i < p; ++i) {
      verts[i + 1][i] += config.initial_step;
      project_box(verts[i + 1], ansatz, config.amplitude_bound);
    }
    std::vector<double> vals(p + 1);
    for (std::size_t i = 0; i <= p; ++i) {
      vals[i] = ev(verts[i]);
      track_best(trace, verts[i], vals[i]);
    }

    std::vector<std::size_t> order(p + 1);
    auto sort_simplex = [&] {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) {
                         return vals[a] < vals[b];
                       });
    };

    double prev_best = std::numeric_limits<double>::infinity();
    int stall = 0;
    std::int64_t recorded_shots = 0;
    Clock::time_point mark = Clock::now();

    for (int iter = 0;; ++iter) {
      sort_simplex();
      const std::size_t lo = order[0];
      const std::size_t hi = order[p];
      const std::size_t next_hi = order[p == 0 ? 0 : p - 1];

      IterationRecord rec;
      rec.iter = iter;
      rec.params = verts[lo];
      rec.j = vals[lo];
      rec.grad_norm = 0;
      rec.shots = ev.shots() - recorded_shots;
      recorded_shots = ev.shots();
      rec.wall_seconds = seconds_since(mark);
      mark = Clock::now();
      trace.iterations.push_back(std::move(rec));

      stall = std::abs(prev_best - vals[lo]) < config.j_tol ? stall + 1 : 0;
      prev_best = vals[lo];
      if (stall >= config.stall_window) {
        trace.status = TerminalStatus::Converged;
        break;
      }
      if (iter >= config.max_iterations) {
        trace.status = TerminalStatus::MaxIterations;
        break;
      }

      std::vector<double> centroid(p, 0.0);
      for (std::size_t i = 0; i <= p; ++i) {
        if (i == hi) continue;
        for (std::size_t d = 0; d < p; ++d) centroid[d] += verts[i][d];
      }
      for (double& c : centroid) c /= static_cast<double>(p);

      auto propose = [&](double coeff) {
        std::vector<double> out(p);
        for (std::size_t d = 0; d < p; ++d)
          out[d] = centroid[d] + coeff * (centroid[d] - verts[hi][d]);
        project_box(out, ansatz, config.amplitude_bound);
        return out;
      };

      const std::vector<double> refl = propose(1.0);
      const double j_refl = ev(refl);
      if (j_refl < vals[lo]) {
        const std::vector<double> expa = propose(2.0);
        const double j_expa = ev(expa);
        if (j_expa < j_refl) {
          verts[hi] = expa;
          vals[hi] = j_expa;
        } else {
          verts[hi] = refl;
          vals[hi] = j_refl;
        }
      } else if (j_refl < vals[next_hi]) {
        verts[hi] = refl;
        vals[hi] = j_refl;
      } else {
        const bool outside = j_refl < vals[hi];
        const std::vector<double> contr = propose(outside ? 0.5 : -0.5);
        const double j_contr = ev(contr);
        if (j_contr < (outside ? j_refl : vals[hi])) {
          verts[hi] = contr;
          vals[hi] = j_contr;
        } else {
          for (std::size_t i = 0; i <= p; ++i) {
            if (i == lo) continue;
            for (std::size_t d = 0; d < p; ++d)
              verts[i][d] = verts[lo][d] + 0.5 * (verts[i][d] - verts[lo][d]);
            project_box(verts[i], ansatz, config.amplitude_bound);
            vals[i] = ev(verts[i]);
          }
        }
      }
      for (std::size_t i = 0; i <= p; ++i) track_best(trace, verts[i], vals[i]);
    }
  } catch (const NonFinite&) {
    trace.status = TerminalStatus::Stalled;
  }
  trace.total_shots = ev.shots();
  return trace;
}

double terminal_j(const OptimizationTrace& trace) {
  if (trace.iterations.empty())
    return std::numeric_limits<double>::infinity();
  return trace.iterations.back().j;
}

}  // namespace

OptimizationTrace optimize(const ObjectiveSpec& spec,
                           const ParametrizedState& ansatz,
                           const OptimizerConfig& config) {
  const int p = ansatz.param_count();
  if (config.initial_params &&
      config.initial_params->size() != static_cast<std::size_t>(p))
    throw std::invalid_argument("initial parameter count mismatch");
  if (config.max_iterations < 0)
    throw std::invalid_argument("iteration budget must be nonnegative");
  if (p == 0 && config.method == OptimizerMethod::NelderMead)
    throw std::invalid_argument("the simplex needs at least one parameter");

  const int restarts =
      config.restarts > 0 ? config.restarts : (spec.exact() ? 1 : 5);

  auto run_one = [&](int r) {
    std::vector<double> x0(static_cast<std::size_t>(p));
    if (r == 0 && config.initial_params) {
      x0 = *config.initial_params;
    } else {
      auto rng = make_rng(config.seed,
                          {hash_tag("init"), static_cast<std::uint64_t>(r)});
      for (int i = 0; i < p; ++i)
        x0[static_cast<std::size_t>(i)] =
            ansatz.kind(i) == ParamKind::Angle
                ? uniform_in(rng, 0.0, 2 * std::numbers::pi)
                : uniform_in(rng, -1.0, 1.0);
    }
    return config.method == OptimizerMethod::GradientDescent
               ? run_gradient_descent(spec, ansatz, config, std::move(x0), r)
               : run_nelder_mead(spec, ansatz, config, std::move(x0), r);
  };

  std::vector<OptimizationTrace> traces(static_cast<std::size_t>(restarts));
  const int workers = std::clamp(config.threads, 1, restarts);
  if (workers == 1) {
    for (int r = 0; r < restarts; ++r)
      traces[static_cast<std::size_t>(r)] = run_one(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int r = next.fetch_add(1); r < restarts; r = next.fetch_add(1))
            traces[static_cast<std::size_t>(r)] = run_one(r);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors)
      if (e) std::rethrow_exception(e);
  }

  // Deterministic merge: lowest terminal J wins, ties keep the earliest.
  std::size_t best = 0;
  for (std::size_t r = 1; r < traces.size(); ++r)
    if (terminal_j(traces[r]) < terminal_j(traces[best])) best = r;
  return std::move(traces[best]);
}

}  // namespace varqc
