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

#include "varqc/pulse.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "varqc/errors.hpp"

namespace varqc {

namespace {

using cd = std::complex<double>;

// sin(x)/x with a series fallback where cancellation would bite.
double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

Eigen::MatrixXcd dense_slice(const ControlSystem& sys,
                             const Eigen::MatrixXcd& h0d,
                             const std::vector<Eigen::MatrixXcd>& hkd,
                             const PulseSchedule& sched, int m) {
  Eigen::MatrixXcd a = h0d;
  for (int k = 0; k < sys.num_controls(); ++k)
    a += sched.amplitudes(m, k) * hkd[static_cast<std::size_t>(k)];
  return a;
}

}  // namespace

void validate_system(const ControlSystem& sys) {
  if (sys.n <= 0)
    throw std::invalid_argument("system qubit count must be positive");
  if (!(sys.T > 0)) throw std::invalid_argument("total time must be positive");
  if (sys.M < 1) throw std::invalid_argument("slice count must be at least 1");
  if (!sys.h0.empty() && sys.h0.num_qubits() != sys.n)
    throw std::invalid_argument("drift qubit count differs from n");
  for (const PauliSum& h : sys.controls)
    if (h.num_qubits() != sys.n)
      throw std::invalid_argument("control qubit count differs from n");
}

void validate_schedule(const ControlSystem& sys, const PulseSchedule& sched) {
  if (sched.slices() != sys.M || sched.num_controls() != sys.num_controls())
    throw std::invalid_argument(
        "schedule shape (" + std::to_string(sched.slices()) + ", " +
        std::to_string(sched.num_controls()) + ") does not match system (" +
        std::to_string(sys.M) + ", " + std::to_string(sys.num_controls()) +
        ")");
  if (!sched.amplitudes.allFinite())
    throw std::invalid_argument("schedule contains non-finite amplitudes");
}

PauliSum slice_hamiltonian(const ControlSystem& sys,
                           const PulseSchedule& sched, int m) {
  PauliSum h = sys.h0.empty() ? PauliSum(sys.n) : sys.h0;
  for (int k = 0; k < sys.num_controls(); ++k)
    h += sched.amplitudes(m, k) * sys.controls[static_cast<std::size_t>(k)];
  return h;
}

Unitary propagator_piecewise(const ControlSystem& sys,
                             const PulseSchedule& sched) {
  validate_system(sys);
  validate_schedule(sys, sched);
  check_dense_cap(sys.n);
  const std::int64_t dim = std::int64_t{1} << sys.n;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (int m = 0; m < sys.M; ++m)
    u = evolution_operator(to_dense(slice_hamiltonian(sys, sched, m)),
                           sys.dt()) *
        u;
  return Unitary{sys.n, std::move(u)};
}

StateVector propagate_state(const ControlSystem& sys,
                            const PulseSchedule& sched,
                            const StateVector& psi0) {
  validate_system(sys);
  validate_schedule(sys, sched);
  if (psi0.n != sys.n)
    throw std::invalid_argument("initial state qubit count differs");
  StateVector psi = psi0;
  for (int m = 0; m < sys.M; ++m)
    psi = evolve_const(psi, slice_hamiltonian(sys, sched, m), sys.dt());
  return psi;
}

double pulse_objective(const ControlSystem& sys, const PulseSchedule& sched,
                       const PauliSum& h_p, const StateVector& psi0) {
  if (h_p.num_qubits() != sys.n)
    throw std::invalid_argument("objective qubit count differs from system");
  return expectation(propagate_state(sys, sched, psi0), h_p);
}

HermitianEigen eigen_decompose(const Eigen::MatrixXcd& herm) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
  return HermitianEigen{es.eigenvectors(), es.eigenvalues()};
}

Eigen::MatrixXcd evolution_from_eigen(const HermitianEigen& eig, double dt) {
  const Eigen::VectorXcd ph =
      (cd(0, -dt) * eig.values.array()).exp().matrix();
  return eig.vectors * ph.asDiagonal() * eig.vectors.adjoint();
}

double exp_derivative_overlap(const HermitianEigen& eig, double dt,
                              const Eigen::MatrixXcd& h,
                              const Eigen::VectorXcd& chi,
                              const Eigen::VectorXcd& psi) {
  // In the eigenbasis of A, (dU)_pq = Gamma_pq (V† H V)_pq with
  // Gamma_pq = exp(-i dt (l_p+l_q)/2) * (-i dt) * sinc(dt (l_p-l_q)/2);
  // the sinc form is exact and has no cancellation, and its limit at
  // l_p = l_q is the confluent derivative -i dt exp(-i dt l_p).
  const Eigen::Index d = eig.values.size();
  const Eigen::VectorXcd a = eig.vectors.adjoint() * chi;
  const Eigen::VectorXcd b = eig.vectors.adjoint() * psi;
  const Eigen::MatrixXcd bmat =
      eig.vectors.adjoint() * h * eig.vectors;
  cd acc(0, 0);
  for (Eigen::Index p = 0; p < d; ++p) {
    for (Eigen::Index q = 0; q < d; ++q) {
      const double mean = 0.5 * (eig.values(p) + eig.values(q));
      const double half_gap = 0.5 * (eig.values(p) - eig.values(q));
      const cd gamma = std::exp(cd(0, -dt * mean)) * cd(0, -dt) *
                       sinc(dt * half_gap);
      acc += std::conj(a(p)) * gamma * bmat(p, q) * b(q);
    }
  }
  return 2.0 * acc.real();
}

Eigen::MatrixXd grape_gradient(const ControlSystem& sys,
                               const PulseSchedule& sched, const PauliSum& h_p,
                               const StateVector& psi0) {
  validate_system(sys);
  validate_schedule(sys, sched);
  if (psi0.n != sys.n || h_p.num_qubits() != sys.n)
    throw std::invalid_argument("gradient qubit counts differ");
  check_dense_cap(sys.n);
  const double dt = sys.dt();
  const int kc = sys.num_controls();

  const Eigen::MatrixXcd h0d =
      sys.h0.empty()
          ? Eigen::MatrixXcd::Zero(std::int64_t{1} << sys.n,
                                   std::int64_t{1} << sys.n)
          : to_dense(sys.h0);
  std::vector<Eigen::MatrixXcd> hkd;
  hkd.reserve(static_cast<std::size_t>(kc));
  for (const PauliSum& h : sys.controls) hkd.push_back(to_dense(h));

  // Forward states psi_0..psi_M plus each slice's eigendecomposition.
  std::vector<Eigen::VectorXcd> psi(static_cast<std::size_t>(sys.M) + 1);
  std::vector<HermitianEigen> eig(static_cast<std::size_t>(sys.M));
  psi[0] = psi0.amps;
  for (int m = 0; m < sys.M; ++m) {
    eig[static_cast<std::size_t>(m)] =
        eigen_decompose(dense_slice(sys, h0d, hkd, sched, m));
    psi[static_cast<std::size_t>(m) + 1] =
        evolution_from_eigen(eig[static_cast<std::size_t>(m)], dt) *
        psi[static_cast<std::size_t>(m)];
  }

  // Costate chi_m = U_{m+1}† ... U_M† H_p psi_M; dJ/dc[m][k] is the
  // derivative overlap of chi_m against psi_{m-1}.
  Eigen::VectorXcd chi = Eigen::VectorXcd::Zero(psi[0].size());
  {
    StateVector psi_T{sys.n, psi[static_cast<std::size_t>(sys.M)]};
    for (const PauliTerm& t : h_p.terms())
      chi += t.coeff * apply_pauli(psi_T, t.string).amps;
  }
  Eigen::MatrixXd grad(sys.M, kc);
  for (int m = sys.M - 1; m >= 0; --m) {
    const HermitianEigen& e = eig[static_cast<std::size_t>(m)];
    for (int k = 0; k < kc; ++k)
      grad(m, k) = exp_derivative_overlap(
          e, dt, hkd[static_cast<std::size_t>(k)], chi,
          psi[static_cast<std::size_t>(m)]);
    chi = evolution_from_eigen(e, -dt) * chi;
  }
  return grad;
}

PulseSchedule parse_schedule_csv(std::istream& in) {
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line))
    throw ParseError("empty schedule file", 1);
  ++lineno;
  // Header: slice,k0,k1,...
  {
    std::istringstream hs(line);
    std::string tok;
    if (!std::getline(hs, tok, ',') || tok != "slice")
      throw ParseError("expected header starting with 'slice'", 1, 1);
    int k = 0;
    while (std::getline(hs, tok, ',')) {
      if (tok != "k" + std::to_string(k))
        throw ParseError("expected header column 'k" + std::to_string(k) +
                             "', got '" + tok + "'",
                         1);
      ++k;
    }
    if (k == 0) throw ParseError("schedule has no control columns", 1);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string tok;
    std::vector<double> row;
    int col = 0;
    while (std::getline(ls, tok, ',')) {
      ++col;
      std::size_t parsed = 0;
      double v = 0;
      try {
        v = std::stod(tok, &parsed);
      } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + tok + "'", lineno, col);
      }
      if (parsed != tok.size())
        throw ParseError("expected a number, got '" + tok + "'", lineno, col);
      row.push_back(v);
    }
    if (row.size() < 2)
      throw ParseError("row needs a slice index and at least one amplitude",
                       lineno);
    if (row[0] != static_cast<double>(rows.size() + 1))
      throw ParseError("expected slice index " +
                           std::to_string(rows.size() + 1),
                       lineno, 1);
    row.erase(row.begin());
    if (!rows.empty() && rows.front().size() != row.size())
      throw ParseError("row has " + std::to_string(row.size()) +
                           " amplitudes, expected " +
                           std::to_string(rows.front().size()),
                       lineno);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("schedule has no slices", lineno);
  PulseSchedule sched;
  sched.amplitudes.resize(static_cast<Eigen::Index>(rows.size()),
                          static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t m = 0; m < rows.size(); ++m)
    for (std::size_t k = 0; k < rows[m].size(); ++k)
      sched.amplitudes(static_cast<Eigen::Index>(m),
                       static_cast<Eigen::Index>(k)) = rows[m][k];
  if (!sched.amplitudes.allFinite())
    throw ParseError("schedule contains non-finite amplitudes", lineno);
  return sched;
}

PulseSchedule parse_schedule_csv(const std::string& text) {
  std::istringstream ss(text);
  return parse_schedule_csv(ss);
}

std::string schedule_to_csv(const PulseSchedule& sched) {
  std::string out = "slice";
  for (int k = 0; k < sched.num_controls(); ++k)
    out += ",k" + std::to_string(k);
  out += '\n';
  for (int m = 0; m < sched.slices(); ++m) {
    out += std::to_string(m + 1);
    for (int k = 0; k < sched.num_controls(); ++k) {
      out += ',';
      out += format_double(sched.amplitudes(m, k));
    }
    out += '\n';
  }
  return out;
}

namespace {

nlohmann::json sum_to_pairs(const PauliSum& h) {
  nlohmann::json arr = nlohmann::json::array();
  for (const PauliTerm& t : h.terms())
    arr.push_back({t.coeff, t.string.str()});
  return arr;
}

PauliSum sum_from_pairs(int n, const nlohmann::json& arr) {
  std::vector<PauliTerm> terms;
  for (const nlohmann::json& pair : arr)
    terms.push_back(PauliTerm{pair.at(0).get<double>(),
                              PauliString::parse(
                                  pair.at(1).get<std::string>())});
  return PauliSum(n, std::move(terms));
}

}  // namespace

nlohmann::json system_to_json(const ControlSystem& sys) {
  nlohmann::json controls = nlohmann::json::array();
  for (const PauliSum& h : sys.controls) controls.push_back(sum_to_pairs(h));
  return nlohmann::json{{"n", sys.n},
                        {"h0", sum_to_pairs(sys.h0)},
                        {"controls", std::move(controls)},
                        {"T", sys.T},
                        {"M", sys.M}};
}

ControlSystem system_from_json(const nlohmann::json& j) {
  ControlSystem sys;
  sys.n = j.at("n").get<int>();
  if (sys.n < 1) throw std::invalid_argument("qubit count must be positive");
  sys.h0 = sum_from_pairs(sys.n, j.at("h0"));
  for (const nlohmann::json& cj : j.at("controls"))
    sys.controls.push_back(sum_from_pairs(sys.n, cj));
  sys.T = j.at("T").get<double>();
  sys.M = j.at("M").get<int>();
  validate_system(sys);
  return sys;
}

}  // namespace varqc
