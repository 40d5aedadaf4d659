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

#include "varqc/landscape.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "varqc/errors.hpp"
#include "varqc/rng.hpp"

namespace varqc {

namespace {

using cd = std::complex<double>;

double checked_eval(const ScalarObjective& objective,
                    const std::vector<double>& x, const char* where, int i) {
  const double v = objective(x);
  if (!std::isfinite(v))
    throw std::runtime_error(std::string("objective returned a non-finite "
                                         "value while differencing ") +
                             where + " component " + std::to_string(i));
  return v;
}

}  // namespace

std::vector<double> gradient_fd(const ScalarObjective& objective,
                                const std::vector<double>& x, double h) {
  if (h <= 0) throw std::invalid_argument("difference step must be positive");
  std::vector<double> grad(x.size());
  std::vector<double> work = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int ii = static_cast<int>(i);
    work[i] = x[i] + h;
    const double jp = checked_eval(objective, work, "gradient", ii);
    work[i] = x[i] - h;
    const double jm = checked_eval(objective, work, "gradient", ii);
    work[i] = x[i];
    grad[i] = (jp - jm) / (2 * h);
  }
  return grad;
}

Eigen::MatrixXd hessian_fd(const ScalarObjective& objective,
                           const std::vector<double>& x, double h) {
  if (h <= 0) throw std::invalid_argument("difference step must be positive");
  const int p = static_cast<int>(x.size());
  Eigen::MatrixXd hess(p, p);
  std::vector<double> work = x;
  const double j0 = checked_eval(objective, work, "hessian", -1);
  for (int i = 0; i < p; ++i) {
    work[i] = x[i] + h;
    const double jp = checked_eval(objective, work, "hessian", i);
    work[i] = x[i] - h;
    const double jm = checked_eval(objective, work, "hessian", i);
    work[i] = x[i];
    hess(i, i) = (jp - 2 * j0 + jm) / (h * h);
  }
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      double quad[4];
      int q = 0;
      for (double si : {1.0, -1.0})
        for (double sj : {1.0, -1.0}) {
          work[i] = x[i] + si * h;
          work[j] = x[j] + sj * h;
          quad[q++] = checked_eval(objective, work, "hessian", j);
        }
      work[i] = x[i];
      work[j] = x[j];
      const double v = (quad[0] - quad[1] - quad[2] + quad[3]) / (4 * h * h);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  return (hess + hess.transpose()) / 2;
}

CriticalPointClass classify_critical_point(const Eigen::MatrixXd& hess,
                                           std::optional<double> tol) {
  if (hess.rows() != hess.cols())
    throw std::invalid_argument("Hessian must be square");
  const double scale = std::max(1.0, hess.norm());
  if ((hess - hess.transpose()).norm() > 1e-8 * scale)
    throw std::invalid_argument("Hessian must be symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      hess, Eigen::EigenvaluesOnly);
  CriticalPointClass out;
  out.eigenvalues.assign(solver.eigenvalues().data(),
                         solver.eigenvalues().data() + hess.rows());

  double max_abs = 0;
  for (double e : out.eigenvalues) max_abs = std::max(max_abs, std::abs(e));
  out.tolerance = tol ? *tol : std::max(1e-6 * max_abs, 1e-10);

  int pos = 0;
  int neg = 0;
  for (double e : out.eigenvalues) {
    if (e > out.tolerance) ++pos;
    if (e < -out.tolerance) ++neg;
  }
  const int total = static_cast<int>(out.eigenvalues.size());
  if (pos == total && total > 0)
    out.classification = CriticalPointKind::Minimum;
  else if (neg == total && total > 0)
    out.classification = CriticalPointKind::Maximum;
  else if (pos > 0 && neg > 0)
    out.classification = CriticalPointKind::Saddle;
  else
    out.classification = CriticalPointKind::Degenerate;
  return out;
}

std::vector<SpectralWeight> spectral_weights(const StateVector& psi,
                                             const PauliSum& h_p) {
  if (psi.n != h_p.num_qubits())
    throw std::invalid_argument("state and operator qubit counts differ");
  check_dense_cap(psi.n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_dense(h_p));
  const Eigen::VectorXd& energies = solver.eigenvalues();

  // Eigen returns ascending eigenvalues, so degenerate groups are runs.
  std::vector<SpectralWeight> out;
  Eigen::Index k = 0;
  while (k < energies.size()) {
    const double anchor = energies(k);
    double energy_sum = 0;
    double weight = 0;
    Eigen::Index count = 0;
    while (k < energies.size() && energies(k) - anchor <= 1e-9) {
      const cd amp = solver.eigenvectors().col(k).dot(psi.amps);
      weight += std::norm(amp);
      energy_sum += energies(k);
      ++count;
      ++k;
    }
    out.push_back({energy_sum / static_cast<double>(count), weight});
  }
  return out;
}

UnitaryFamily unitary_family(Circuit c) {
  validate_circuit(c);
  UnitaryFamily fam;
  fam.n = c.n;
  fam.param_count = static_cast<int>(c.params.size());
  fam.unitary = [c = std::move(c)](std::span<const double> params) {
    return circuit_unitary(c, params);
  };
  return fam;
}

UnitaryFamily unitary_family(ControlSystem sys) {
  validate_system(sys);
  UnitaryFamily fam;
  fam.n = sys.n;
  fam.param_count = sys.M * sys.num_controls();
  fam.unitary = [sys = std::move(sys)](std::span<const double> params) {
    PulseSchedule sched;
    const int k = sys.num_controls();
    sched.amplitudes.resize(sys.M, k);
    for (int m = 0; m < sys.M; ++m)
      for (int j = 0; j < k; ++j)
        sched.amplitudes(m, j) =
            params[static_cast<std::size_t>(m) * k + j];
    return propagator_piecewise(sys, sched).matrix;
  };
  return fam;
}

UnitaryFamily unitary_family(HybridAnsatz h) {
  UnitaryFamily fam;
  fam.n = h.n;
  fam.param_count = h.param_count();
  fam.unitary = [h = std::move(h)](std::span<const double> params) {
    return hybrid_unitary(h, params);
  };
  return fam;
}

SurjectivityReport local_surjectivity_rank(const UnitaryFamily& family,
                                           std::span<const double> params,
                                           double h, int n_cap) {
  if (family.n > n_cap)
    throw ResourceLimitError(
        "surjectivity rank needs a 2*4^n row Jacobian; " +
        std::to_string(family.n) + " qubits exceeds the cap of " +
        std::to_string(n_cap));
  if (params.size() != static_cast<std::size_t>(family.param_count))
    throw std::invalid_argument("parameter count mismatch");
  if (h <= 0) throw std::invalid_argument("difference step must be positive");

  SurjectivityReport report;
  const std::int64_t d = std::int64_t{1} << family.n;
  report.max_rank = d * d;
  report.param_count = family.param_count;
  if (family.param_count == 0) return report;

  std::vector<double> work(params.begin(), params.end());
  Eigen::MatrixXd jac(2 * d * d, family.param_count);
  for (int p = 0; p < family.param_count; ++p) {
    const std::size_t sp = static_cast<std::size_t>(p);
    const double saved = work[sp];
    work[sp] = saved + h;
    const Eigen::MatrixXcd up = family.unitary(work);
    work[sp] = saved - h;
    const Eigen::MatrixXcd um = family.unitary(work);
    work[sp] = saved;
    const Eigen::MatrixXcd diff = (up - um) / (2 * h);
    for (std::int64_t col = 0; col < d; ++col)
      for (std::int64_t row = 0; row < d; ++row) {
        const std::int64_t entry = col * d + row;
        jac(2 * entry, p) = diff(row, col).real();
        jac(2 * entry + 1, p) = diff(row, col).imag();
      }
  }

  const Eigen::VectorXd sv = jac.jacobiSvd().singularValues();
  if (sv.size() == 0 || sv(0) == 0) return report;
  const double threshold = 1e-7 * sv(0);
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > threshold) ++report.rank;
  return report;
}

VarianceScanResult gradient_variance_scan(
    const std::function<Circuit(int)>& builder,
    const std::function<PauliSum(int)>& problem, std::span<const int> ns,
    int samples, std::uint64_t seed, double fd_step) {
  if (samples < 30)
    throw std::invalid_argument(
        "variance scans need at least 30 samples per register size");
  if (fd_step <= 0)
    throw std::invalid_argument("difference step must be positive");

  VarianceScanResult result;
  for (int n : ns) {
    const Circuit circ = builder(n);
    validate_circuit(circ);
    const PauliSum h_p = problem(n);
    if (circ.n != n || h_p.num_qubits() != n)
      throw std::invalid_argument("family output disagrees with n=" +
                                  std::to_string(n));
    const std::size_t p = circ.params.size();
    if (p == 0)
      throw std::invalid_argument("variance scans need a parametrized "
                                  "ansatz");

    const StateVector psi0 = zero_state(n);
    auto objective = [&](const std::vector<double>& theta) {
      return expectation(evaluate_circuit(circ, theta, psi0), h_p);
    };

    std::vector<double> grads;
    grads.reserve(static_cast<std::size_t>(samples));
    for (int s = 0; s < samples; ++s) {
      auto rng = make_rng(seed, {static_cast<std::uint64_t>(n),
                                 static_cast<std::uint64_t>(s)});
      std::vector<double> theta(p);
      for (double& t : theta) t = uniform_in(rng, 0.0, 2 * std::numbers::pi);

      VarianceSample rec;
      rec.n = n;
      rec.sample = s;
      rec.objective = objective(theta);
      std::vector<double> work = theta;
      double norm_sq = 0;
      for (std::size_t i = 0; i < p; ++i) {
        work[i] = theta[i] + fd_step;
        const double jp = objective(work);
        work[i] = theta[i] - fd_step;
        const double jm = objective(work);
        work[i] = theta[i];
        const double g = (jp - jm) / (2 * fd_step);
        if (i == 0) rec.grad_component = g;
        norm_sq += g * g;
      }
      rec.grad_norm = std::sqrt(norm_sq);
      grads.push_back(rec.grad_component);
      result.samples.push_back(rec);
    }

    double mean = 0;
    for (double g : grads) mean += g;
    mean /= static_cast<double>(samples);
    double var = 0;
    for (double g : grads) var += (g - mean) * (g - mean);
    var /= static_cast<double>(samples - 1);
    result.per_n.push_back({n, var});
  }
  return result;
}

}  // namespace varqc
