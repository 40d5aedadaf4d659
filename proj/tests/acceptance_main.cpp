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
//
// End-to-end acceptance checks. Each criterion is validated against an
// independent oracle (dense linear algebra, finite differences, binomial
// statistics) and prints a single PASS/FAIL line; the process exits
// nonzero if any criterion fails. argv[1] is the path to the command-line
// binary, used by the reproducibility check.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oracle.hpp"
#include "varqc/circuit.hpp"
#include "varqc/controllability.hpp"
#include "varqc/driver.hpp"
#include "varqc/landscape.hpp"
#include "varqc/level_maps.hpp"
#include "varqc/pauli.hpp"
#include "varqc/pulse.hpp"
#include "varqc/rng.hpp"
#include "varqc/state.hpp"

namespace {

namespace fs = std::filesystem;
using cd = std::complex<double>;
using varqc::Axis;
using varqc::Circuit;
using varqc::CircuitState;
using varqc::ControlSystem;
using varqc::Gate;
using varqc::ObjectiveSpec;
using varqc::OptimizerConfig;
using varqc::PauliString;
using varqc::PauliSum;
using varqc::PauliTerm;
using varqc::PulseSchedule;
using varqc::SampledMode;
using varqc::StateVector;

constexpr double kPi = std::numbers::pi;

std::string g_cli_path;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

Circuit random_circuit(std::mt19937_64& rng, int n, int depth) {
  Circuit c;
  c.n = n;
  for (int d = 0; d < depth; ++d) {
    const int q = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    switch (rng() % (n >= 2 ? 5 : 4)) {
      case 0:
        c.gates.push_back(Gate::h(q));
        break;
      case 1:
        c.gates.push_back(Gate::x(q));
        break;
      case 2: {
        PauliString s = oracle::random_string(rng, n);
        if (s.is_identity()) s.axes[0] = Axis::Y;
        c.gates.push_back(
            Gate::rotation(std::move(s), varqc::uniform_in(rng, -kPi, kPi)));
        break;
      }
      case 3:
        c.gates.push_back(Gate::sum_exp(oracle::random_sum(rng, n, 2, false),
                                        varqc::uniform_in(rng, -1.0, 1.0)));
        break;
      default: {
        int a = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
        int b = static_cast<int>(rng() % static_cast<std::uint64_t>(n - 1));
        if (b >= a) ++b;
        c.gates.push_back(Gate::cz(a, b));
        break;
      }
    }
  }
  return c;
}

// ---------------------------------------------------------------------
// 1. Circuit evaluation against the dense matrix product.
// ---------------------------------------------------------------------
bool check_circuit_oracle(std::ostream& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const Circuit c = random_circuit(rng, n, 12);
    const Eigen::VectorXcd amps = oracle::random_state(rng, n);

    Eigen::VectorXcd expect = amps;
    for (const Gate& g : c.gates) expect = oracle::dense_gate(g, n) * expect;

    const StateVector got = varqc::evaluate_circuit(c, varqc::make_state(n, amps));
    worst = std::max(worst, (got.amps - expect).cwiseAbs().maxCoeff());
  }
  const double secs = seconds_since(t0);
  detail << "worst amplitude deviation " << worst << ", " << secs << " s";
  return worst < 1e-10 && secs < 10.0;
}

// ---------------------------------------------------------------------
// 2. Adjoint pulse gradients against central finite differences.
// ---------------------------------------------------------------------
bool check_pulse_gradients(std::ostream& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(202);
  double worst_rel = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    ControlSystem sys;
    sys.n = 1 + static_cast<int>(rng() % 3);
    sys.h0 = oracle::random_sum(rng, sys.n, 2);
    const int num_controls = 1 + static_cast<int>(rng() % 2);
    for (int k = 0; k < num_controls; ++k)
      sys.controls.push_back(oracle::random_sum(rng, sys.n, 2, false));
    sys.T = varqc::uniform_in(rng, 0.5, 2.0);
    sys.M = 2 + static_cast<int>(rng() % 15);

    PulseSchedule sched;
    sched.amplitudes.resize(sys.M, num_controls);
    for (int m = 0; m < sys.M; ++m)
      for (int k = 0; k < num_controls; ++k)
        sched.amplitudes(m, k) = varqc::uniform_in(rng, -1.0, 1.0);

    const PauliSum h_p = oracle::random_sum(rng, sys.n, 3, false);
    const StateVector psi0 =
        varqc::make_state(sys.n, oracle::random_state(rng, sys.n));

    const Eigen::MatrixXd grad = varqc::grape_gradient(sys, sched, h_p, psi0);
    // Fourth-order central stencil at the step balancing truncation
    // against roundoff; its own error is a few 1e-13 absolute, so a
    // relative comparison is meaningful down to about 1e-6 components.
    const double h = 2e-4;
    for (int m = 0; m < sys.M; ++m) {
      for (int k = 0; k < num_controls; ++k) {
        PulseSchedule pert = sched;
        const double base = sched.amplitudes(m, k);
        const auto at = [&](double x) {
          pert.amplitudes(m, k) = x;
          return varqc::pulse_objective(sys, pert, h_p, psi0);
        };
        const double fd = (-at(base + 2 * h) + 8 * at(base + h) -
                           8 * at(base - h) + at(base - 2 * h)) /
                          (12 * h);
        const double diff = std::abs(grad(m, k) - fd);
        if (std::abs(fd) >= 1e-6)
          worst_rel = std::max(worst_rel, diff / std::abs(fd));
        else if (diff >= 1e-7)
          worst_rel = std::max(worst_rel, 1.0);
      }
    }
  }
  const double secs = seconds_since(t0);
  detail << "worst relative error " << worst_rel << ", " << secs << " s";
  return worst_rel < 1e-6 && secs < 60.0;
}

// ---------------------------------------------------------------------
// 3. Digitization error halves when the slice count doubles; commuting
//    generators digitize exactly in one step.
// ---------------------------------------------------------------------
bool check_digitization(std::ostream& detail) {
  ControlSystem xz;
  xz.n = 1;
  xz.h0 = PauliSum(1, {{0.5, PauliString::parse("X")},
                       {0.5, PauliString::parse("Z")}});
  xz.T = 1.0;
  xz.M = 1;
  PulseSchedule empty;
  empty.amplitudes.resize(1, 0);

  const Eigen::MatrixXcd exact = varqc::propagator_piecewise(xz, empty).matrix;
  std::vector<double> errors;
  for (int r : {4, 8, 16}) {
    const Circuit c = varqc::digitize(xz, empty, r);
    errors.push_back(
        (varqc::circuit_unitary(c) - exact).jacobiSvd().singularValues()(0));
  }
  const double ratio_a = errors[0] / errors[1];
  const double ratio_b = errors[1] / errors[2];

  // Mutually commuting terms factor exactly at r = 1.
  ControlSystem com;
  com.n = 2;
  com.h0 = PauliSum(2, {{kPi / 4, PauliString::parse("ZZ")},
                        {-kPi / 4, PauliString::parse("ZI")},
                        {-kPi / 4, PauliString::parse("IZ")}});
  com.T = 1.0;
  com.M = 1;
  const Eigen::MatrixXcd com_exact =
      oracle::expm(cd(0, -1) * oracle::dense_sum(com.h0));
  const Circuit one_step = varqc::digitize(com, empty, 1);
  const double com_err = (varqc::circuit_unitary(one_step) - com_exact)
                             .jacobiSvd()
                             .singularValues()(0);

  detail << "halving ratios " << ratio_a << ", " << ratio_b
         << "; commuting residual " << com_err;
  return ratio_a >= 1.7 && ratio_a <= 2.3 && ratio_b >= 1.7 &&
         ratio_b <= 2.3 && com_err < 1e-10;
}

// ---------------------------------------------------------------------
// 4. The generator extracted from CZ exponentiates back to diag(1,1,1,-1).
// ---------------------------------------------------------------------
bool check_cz_generator(std::ostream& detail) {
  const varqc::GeneratedHamiltonian gen =
      varqc::generate_hamiltonian(Gate::cz(0, 1), 2);
  const Eigen::MatrixXcd u =
      oracle::expm(cd(0, -gen.tau) * oracle::dense_sum(gen.generator));
  Eigen::MatrixXcd cz = Eigen::MatrixXcd::Identity(4, 4);
  cz(3, 3) = -1.0;
  const double overlap = varqc::gate_overlap(u, cz);
  detail << "phase-invariant overlap " << overlap;
  return overlap > 1.0 - 1e-10;
}

// ---------------------------------------------------------------------
// 5. Promoting the entangling gates of the fixed 4-qubit demo circuit
//    to pulse segments leaves the prepared state unchanged.
// ---------------------------------------------------------------------
bool check_hybrid_equivalence(std::ostream& detail) {
  double worst = 1.0;
  for (int k = 0; k < 16; ++k) {
    const double theta = 2.0 * kPi * k / 16.0;
    const Circuit c = varqc::build_h2_circuit(theta);
    std::vector<int> promote;
    for (std::size_t i = 0; i < c.gates.size(); ++i)
      if (c.gates[i].kind == varqc::GateKind::CZ)
        promote.push_back(static_cast<int>(i));
    if (promote.empty()) {
      detail << "no entangling gates found to promote";
      return false;
    }
    const varqc::HybridAnsatz h = varqc::hybridize(c, promote);
    const StateVector psi0 = varqc::zero_state(4);
    const StateVector a = varqc::evaluate_circuit(c, psi0);
    const StateVector b =
        varqc::evaluate_hybrid(h, h.initial_params(), psi0);
    worst = std::min(worst, std::abs(a.amps.dot(b.amps)));
  }
  detail << "worst overlap modulus " << worst;
  return worst > 1.0 - 1e-10;
}

// ---------------------------------------------------------------------
// 6. Lie closure dimensions on the reference systems, re-verified by the
//    dense commutator oracle.
// ---------------------------------------------------------------------
bool check_controllability(std::ostream& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  struct Case {
    const char* name;
    PauliSum drift;
    std::vector<PauliSum> controls;
    int dim;
    bool controllable;
  };
  const auto single = [](const char* axes) {
    return PauliSum::single(1.0, PauliString::parse(axes));
  };
  std::vector<Case> cases;
  cases.push_back({"qubit with one transverse control", single("Z"),
                   {single("X")}, 3, true});
  cases.push_back({"single drive, no drift richness", single("X"), {}, 1,
                   false});
  cases.push_back({"two uncoupled qubits",
                   PauliSum(2, {{1.0, PauliString::parse("ZI")},
                                {1.0, PauliString::parse("IZ")}}),
                   {single("XI"), single("IX")}, 6, false});
  cases.push_back({"coupled pair with entangling drift",
                   PauliSum(2, {{1.0, PauliString::parse("ZZ")},
                                {1.0, PauliString::parse("ZI")},
                                {1.0, PauliString::parse("IZ")}}),
                   {single("XI"), single("IX")}, 15, true});

  bool ok = true;
  for (const Case& c : cases) {
    const varqc::LieAlgebraReport rep =
        varqc::dynamical_lie_algebra(c.drift, c.controls);

    std::vector<Eigen::MatrixXcd> gens;
    gens.push_back(oracle::dense_sum(c.drift));
    for (const PauliSum& h : c.controls) gens.push_back(oracle::dense_sum(h));
    const int oracle_dim = oracle::dense_lie_dimension(gens);

    if (rep.dimension != c.dim || rep.controllable != c.controllable ||
        oracle_dim != c.dim) {
      detail << c.name << ": dimension " << rep.dimension << " (oracle "
             << oracle_dim << ", expected " << c.dim << "), controllable "
             << rep.controllable << "; ";
      ok = false;
    }
  }
  const double secs = seconds_since(t0);
  detail << "4 reference systems agree with the dense oracle, " << secs
         << " s";
  return ok && secs < 5.0;
}

// ---------------------------------------------------------------------
// 7. Exact-mode descent: monotone traces, terminal value above the
//    spectral floor.
// ---------------------------------------------------------------------
bool check_descent_bound(std::ostream& detail) {
  std::mt19937_64 rng(707);
  double worst_gap = -1e300;
  for (int run = 0; run < 20; ++run) {
    const PauliSum h_p = oracle::random_sum(rng, 3, 4, false);
    const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(
                               oracle::dense_sum(h_p))
                               .eigenvalues()
                               .minCoeff();

    const std::vector<double> zeros(6, 0.0);
    CircuitState ansatz(varqc::build_hardware_efficient(3, 2, zeros));
    const ObjectiveSpec spec{h_p, varqc::zero_state(3), std::nullopt};
    OptimizerConfig cfg;
    cfg.seed = 7000 + static_cast<std::uint64_t>(run);
    const varqc::OptimizationTrace trace = varqc::optimize(spec, ansatz, cfg);

    for (std::size_t i = 1; i < trace.iterations.size(); ++i)
      if (trace.iterations[i].j > trace.iterations[i - 1].j + 1e-12) {
        detail << "run " << run << " increased J at iteration " << i;
        return false;
      }
    worst_gap = std::max(worst_gap, min_eig - trace.best_j);
    if (trace.best_j < min_eig - 1e-9) {
      detail << "run " << run << " beat the spectral floor: J = "
             << trace.best_j << " < " << min_eig;
      return false;
    }
  }
  detail << "20 monotone runs, worst floor margin " << -worst_gap;
  return true;
}

// ---------------------------------------------------------------------
// 8. Alternating-layer depth study on the 4-node ring: deeper is no
//    worse, and three rounds reach the exhaustively verified ground
//    energy.
// ---------------------------------------------------------------------
bool check_qaoa_depth(std::ostream& detail) {
  const PauliSum h_p(4, {{1.0, PauliString::parse("ZZII")},
                         {1.0, PauliString::parse("IZZI")},
                         {1.0, PauliString::parse("IIZZ")},
                         {1.0, PauliString::parse("ZIIZ")}});
  PauliSum h_d(4, {{1.0, PauliString::parse("XIII")},
                   {1.0, PauliString::parse("IXII")},
                   {1.0, PauliString::parse("IIXI")},
                   {1.0, PauliString::parse("IIIX")}});

  // The cost operator is diagonal, so brute force over all 16 bitstrings
  // gives the exact ground energy; the dense eigensolver must agree.
  double brute = 1e300;
  for (int bits = 0; bits < 16; ++bits) {
    double e = 0.0;
    const auto s = [&](int q) { return (bits >> (3 - q)) & 1 ? -1.0 : 1.0; };
    e += s(0) * s(1) + s(1) * s(2) + s(2) * s(3) + s(3) * s(0);
    brute = std::min(brute, e);
  }
  const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(
                             oracle::dense_sum(h_p))
                             .eigenvalues()
                             .minCoeff();
  if (std::abs(brute - min_eig) > 1e-12) {
    detail << "ground-energy oracles disagree: " << brute << " vs "
           << min_eig;
    return false;
  }

  const auto best_at_depth = [&](int p, int restarts, int iters) {
    const std::vector<double> zeros(static_cast<std::size_t>(p), 0.0);
    CircuitState ansatz(varqc::build_qaoa(h_p, h_d, p, zeros, zeros));
    const ObjectiveSpec spec{h_p, varqc::plus_state(4), std::nullopt};
    OptimizerConfig cfg;
    cfg.restarts = restarts;
    cfg.max_iterations = iters;
    cfg.seed = 808;
    return varqc::optimize(spec, ansatz, cfg).best_j;
  };

  const double j1 = best_at_depth(1, 20, 300);
  const double j2 = best_at_depth(2, 20, 300);
  const double j3 = best_at_depth(3, 20, 300);

  detail << "best J by depth: " << j1 << ", " << j2 << ", " << j3
         << "; ground " << brute;
  return j2 <= j1 + 1e-9 && std::abs(j3 - brute) <= 1e-6;
}

// ---------------------------------------------------------------------
// 9. Sampled-mode noise matches the binomial prediction and the shot
//    formula quadruples when the precision halves.
// ---------------------------------------------------------------------
bool check_shot_scaling(std::ostream& detail) {
  Circuit empty;
  empty.n = 1;
  CircuitState ansatz(std::move(empty));
  const PauliSum z = PauliSum::single(1.0, PauliString::parse("Z"));

  bool ok = true;
  for (const double eps : {0.1, 0.05}) {
    const std::int64_t shots = varqc::shots_required(1.0, eps);
    std::vector<double> estimates;
    for (int seed = 0; seed < 200; ++seed) {
      SampledMode mode;
      mode.epsilon = eps;
      mode.seed = static_cast<std::uint64_t>(seed);
      const ObjectiveSpec spec{z, varqc::plus_state(1), mode};
      const varqc::EvaluationResult r =
          varqc::evaluate_objective(spec, ansatz, {});
      if (r.shots != shots) {
        detail << "shot count " << r.shots << " != " << shots << "; ";
        ok = false;
      }
      estimates.push_back(r.j);
    }
    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= static_cast<double>(estimates.size());
    double var = 0.0;
    for (double e : estimates) var += (e - mean) * (e - mean);
    var /= static_cast<double>(estimates.size() - 1);
    const double sd = std::sqrt(var);
    // <Z> = 0 on |+>, so each shot is a fair +-1 coin: sd = 1/sqrt(shots).
    const double predicted = 1.0 / std::sqrt(static_cast<double>(shots));
    detail << "eps " << eps << ": sd " << sd << " vs binomial " << predicted
           << "; ";
    if (sd < 0.5 * predicted || sd > 2.0 * predicted) ok = false;
  }

  const bool quadruples =
      varqc::shots_required(1.0, 0.05) == 4 * varqc::shots_required(1.0, 0.1) &&
      varqc::shots_required(1.5, 0.05) == 4 * varqc::shots_required(1.5, 0.1) &&
      varqc::shots_required(0.7, 0.05) == 4 * varqc::shots_required(0.7, 0.1);
  if (!quadruples) detail << "halving the precision did not quadruple shots";
  return ok && quadruples;
}

// ---------------------------------------------------------------------
// 10. The precision-fidelity model holds to machine precision and its
//     inverted tolerance falls by half when the dimension quadruples.
// ---------------------------------------------------------------------
bool check_precision_model(std::ostream& detail) {
  double worst_residual = 0.0;
  for (const std::int64_t d : {std::int64_t{1}, std::int64_t{2},
                               std::int64_t{3}, std::int64_t{10},
                               std::int64_t{64}, std::int64_t{1000},
                               std::int64_t{4096}}) {
    for (const double delta : {0.0, 1e-8, 1e-3, 0.1, 0.5, 1.0, 2.0}) {
      const double f = varqc::control_precision_fidelity(d, delta);
      const double q = 1.0 + static_cast<double>(d - 1) * delta * delta;
      worst_residual = std::max(worst_residual, std::abs(f * q - 1.0));
      if (f != 1.0 / q) {
        detail << "fidelity differs from the closed form at d=" << d
               << ", delta=" << delta;
        return false;
      }
    }
  }

  // delta(F, d) = sqrt((1/F - 1)/(d - 1)); the d -> 4d ratio approaches 2
  // from above, monotonically, reaching the 1e-9 band in the large-d
  // regime of the model.
  const auto delta_for = [](double f, double d) {
    return std::sqrt((1.0 / f - 1.0) / (d - 1.0));
  };
  const double f_target = 0.9;
  double prev = 1e300;
  bool monotone = true;
  for (double d = 64.0; d <= 1024.0; d *= 2.0) {
    const double ratio = delta_for(f_target, d) / delta_for(f_target, 4.0 * d);
    if (ratio >= prev || ratio <= 2.0) monotone = false;
    prev = ratio;
  }
  const double d_large = 1073741824.0;  // 2^30
  const double limit_ratio =
      delta_for(f_target, d_large) / delta_for(f_target, 4.0 * d_large);
  detail << "identity residual " << worst_residual << ", ratio at d=2^30 "
         << limit_ratio;
  return worst_residual <= std::numeric_limits<double>::epsilon() &&
         monotone && std::abs(limit_ratio - 2.0) < 1e-9;
}

// ---------------------------------------------------------------------
// 11. Gradient variance decays with the register size: the log-variance
//     slope is negative with 2-sigma significance.
// ---------------------------------------------------------------------
bool check_variance_decay(std::ostream& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto builder = [](int n) {
    const std::vector<double> zeros(static_cast<std::size_t>(2 * n), 0.0);
    return varqc::build_hardware_efficient(n, 2, zeros);
  };
  // A global parity observable makes the flattening visible already at
  // fixed depth.
  const auto problem = [](int n) {
    PauliString s = PauliString::identity(n);
    for (int q = 0; q < n; ++q) s.axes[static_cast<std::size_t>(q)] = Axis::Z;
    return PauliSum::single(1.0, s);
  };
  const std::vector<int> ns = {2, 3, 4, 5, 6, 7, 8};
  const varqc::VarianceScanResult res =
      varqc::gradient_variance_scan(builder, problem, ns, 200, 1111);

  // Least-squares slope of ln(variance) on n with its standard error.
  const std::size_t m = res.per_n.size();
  double sx = 0, sy = 0;
  for (const auto& p : res.per_n) {
    sx += p.n;
    sy += std::log(p.variance);
  }
  const double xbar = sx / static_cast<double>(m);
  const double ybar = sy / static_cast<double>(m);
  double sxx = 0, sxy = 0;
  for (const auto& p : res.per_n) {
    sxx += (p.n - xbar) * (p.n - xbar);
    sxy += (p.n - xbar) * (std::log(p.variance) - ybar);
  }
  const double slope = sxy / sxx;
  double rss = 0;
  for (const auto& p : res.per_n) {
    const double fit = ybar + slope * (p.n - xbar);
    rss += (std::log(p.variance) - fit) * (std::log(p.variance) - fit);
  }
  const double se =
      std::sqrt(rss / (static_cast<double>(m) - 2.0) / sxx);
  const double secs = seconds_since(t0);
  detail << "slope " << slope << " +- " << se << ", " << secs << " s";
  return slope + 2.0 * se < 0.0 && secs < 600.0;
}

// ---------------------------------------------------------------------
// 12. Two command-line runs with the same config and seed leave
//     byte-identical trace files.
// ---------------------------------------------------------------------
int run_cli_command(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool check_reproducibility(std::ostream& detail) {
  if (g_cli_path.empty()) {
    detail << "no command-line binary path supplied";
    return false;
  }
  const fs::path dir = fs::temp_directory_path() / "varqc_acceptance_repro";
  fs::remove_all(dir);
  fs::create_directories(dir);

  {
    std::ofstream f(dir / "ring.txt");
    f << "1.0 ZZI\n1.0 IZZ\n1.0 ZIZ\n";
  }
  {
    std::ofstream f(dir / "exp.cfg");
    f << "kind = qaoa\nseed = 11\n[problem]\nhamiltonian = ring.txt\n"
      << "[ansatz]\np = 1\n[optimizer]\nmax_iterations = 15\n"
      << "method = nelder-mead\n[sampling]\nepsilon = 0.2\n";
  }

  for (const char* sub : {"a", "b"}) {
    const std::string cmd = "\"" + g_cli_path + "\" run --config \"" +
                            (dir / "exp.cfg").string() + "\" --out \"" +
                            (dir / sub).string() + "\" > /dev/null 2>&1";
    const int code = run_cli_command(cmd);
    if (code != 0) {
      detail << "command exited with " << code;
      fs::remove_all(dir);
      return false;
    }
  }

  bool identical = true;
  for (const char* name : {"trace.jsonl", "trace.csv", "summary.json"}) {
    const std::string a = slurp(dir / "a" / name);
    const std::string b = slurp(dir / "b" / name);
    if (a.empty() || a != b) {
      detail << name << " differs or is empty; ";
      identical = false;
    }
  }
  detail << "trace files match byte for byte";
  fs::remove_all(dir);
  return identical;
}

struct Criterion {
  int id;
  const char* title;
  std::function<bool(std::ostream&)> body;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli_path = argv[1];

  const std::vector<Criterion> criteria = {
      {1, "circuit evaluation matches the dense matrix oracle",
       check_circuit_oracle},
      {2, "pulse gradients match central finite differences",
       check_pulse_gradients},
      {3, "digitization error halves per slice doubling; commuting case exact",
       check_digitization},
      {4, "the extracted entangling generator reproduces its gate",
       check_cz_generator},
      {5, "gate promotion preserves the prepared state across the family",
       check_hybrid_equivalence},
      {6, "Lie closures match the dense oracle on the reference systems",
       check_controllability},
      {7, "exact descent is monotone and respects the spectral floor",
       check_descent_bound},
      {8, "deeper alternating layers reach the verified ring ground energy",
       check_qaoa_depth},
      {9, "sampling noise is binomial and shots quadruple per half precision",
       check_shot_scaling},
      {10, "the precision-fidelity model is exact with square-root tolerance scaling",
       check_precision_model},
      {11, "gradient variance decays with register size at 2-sigma",
       check_variance_decay},
      {12, "identical command-line runs produce identical traces",
       check_reproducibility},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream detail;
    bool ok = false;
    try {
      ok = c.body(detail);
    } catch (const std::exception& e) {
      detail << "exception: " << e.what();
    }
    const double secs = seconds_since(t0);
    std::printf("%s %2d  %s (%.2f s)\n", ok ? "PASS" : "FAIL", c.id, c.title,
                secs);
    if (!ok) {
      std::printf("        %s\n", detail.str().c_str());
      ++failures;
    }
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
