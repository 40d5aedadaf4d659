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

#include "varqc/state.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "varqc/rng.hpp"

namespace varqc {

namespace {

using cd = std::complex<double>;

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::int64_t qubit_bit(int n, int q) {
  return std::int64_t{1} << (n - 1 - q);
}

void check_qubit(const StateVector& state, int q) {
  if (q < 0 || q >= state.n)
    throw std::invalid_argument("qubit index " + std::to_string(q) +
                                " out of range for n=" +
                                std::to_string(state.n));
}

}  // namespace

StateVector make_state(int n, Eigen::VectorXcd amps) {
  if (n <= 0) throw std::invalid_argument("qubit count must be positive");
  if (amps.size() != (std::int64_t{1} << n))
    throw std::invalid_argument("amplitude vector has dimension " +
                                std::to_string(amps.size()) + ", expected 2^" +
                                std::to_string(n));
  if (std::abs(amps.norm() - 1.0) > kNormTol)
    throw std::invalid_argument("state norm deviates from 1 beyond tolerance");
  return StateVector{n, std::move(amps)};
}

StateVector basis_state(int n, std::uint64_t index) {
  if (n <= 0) throw std::invalid_argument("qubit count must be positive");
  const std::int64_t dim = std::int64_t{1} << n;
  if (index >= static_cast<std::uint64_t>(dim))
    throw std::invalid_argument("basis index out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(static_cast<std::int64_t>(index)) = cd(1, 0);
  return StateVector{n, std::move(v)};
}

StateVector zero_state(int n) { return basis_state(n, 0); }

StateVector plus_state(int n) {
  if (n <= 0) throw std::invalid_argument("qubit count must be positive");
  const std::int64_t dim = std::int64_t{1} << n;
  const double a = std::pow(2.0, -0.5 * n);
  return StateVector{n, Eigen::VectorXcd::Constant(dim, cd(a, 0))};
}

bool is_unitary(const Eigen::MatrixXcd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m.adjoint() * m -
          Eigen::MatrixXcd::Identity(m.rows(), m.cols()))
             .norm() <= tol;
}

Gate Gate::h(int q) { return Gate{GateKind::H, {q}, 0, {}, 1, {}, {}}; }

Gate Gate::x(int q) { return Gate{GateKind::X, {q}, 0, {}, 1, {}, {}}; }

Gate Gate::cz(int a, int b) {
  if (a == b) throw std::invalid_argument("CZ qubits must be distinct");
  return Gate{GateKind::CZ, {a, b}, 0, {}, 1, {}, {}};
}

Gate Gate::rotation(PauliString gen, double angle) {
  return Gate{GateKind::PauliRotation, {}, angle, {}, 1, std::move(gen), {}};
}

Gate Gate::rotation(PauliString gen, std::string param, double scale) {
  return Gate{GateKind::PauliRotation, {}, 0,     std::move(param),
              scale,                   std::move(gen), {}};
}

Gate Gate::sum_exp(PauliSum h, double angle) {
  return Gate{GateKind::PauliSumExp, {}, angle, {}, 1, {}, std::move(h)};
}

Gate Gate::sum_exp(PauliSum h, std::string param, double scale) {
  return Gate{GateKind::PauliSumExp, {},    0, std::move(param),
              scale,                 {},    std::move(h)};
}

StateVector apply_gate(const StateVector& state, const Gate& g) {
  if (g.is_parametrized())
    throw std::invalid_argument("gate parameter '" + *g.param +
                                "' is unbound");
  return apply_gate(state, g, g.angle);
}

StateVector apply_gate(const StateVector& state, const Gate& g, double angle) {
  StateVector out = state;
  switch (g.kind) {
    case GateKind::H: {
      check_qubit(state, g.qubits.at(0));
      const std::int64_t bit = qubit_bit(state.n, g.qubits[0]);
      for (std::int64_t i = 0; i < out.dim(); ++i) {
        if (i & bit) continue;
        const cd a = out.amps(i);
        const cd b = out.amps(i | bit);
        out.amps(i) = (a + b) * kInvSqrt2;
        out.amps(i | bit) = (a - b) * kInvSqrt2;
      }
      return out;
    }
    case GateKind::X: {
      check_qubit(state, g.qubits.at(0));
      const std::int64_t bit = qubit_bit(state.n, g.qubits[0]);
      for (std::int64_t i = 0; i < out.dim(); ++i) {
        if (i & bit) continue;
        std::swap(out.amps(i), out.amps(i | bit));
      }
      return out;
    }
    case GateKind::CZ: {
      check_qubit(state, g.qubits.at(0));
      check_qubit(state, g.qubits.at(1));
      if (g.qubits[0] == g.qubits[1])
        throw std::invalid_argument("CZ qubits must be distinct");
      const std::int64_t mask = qubit_bit(state.n, g.qubits[0]) |
                                qubit_bit(state.n, g.qubits[1]);
      for (std::int64_t i = 0; i < out.dim(); ++i)
        if ((i & mask) == mask) out.amps(i) = -out.amps(i);
      return out;
    }
    case GateKind::PauliRotation: {
      const PauliString& gen = g.generator.value();
      if (gen.num_qubits() != state.n)
        throw std::invalid_argument("rotation generator qubit count differs");
      // exp(-i a/2 G) = cos(a/2) I - i sin(a/2) G since G^2 = I.
      const StateVector gpsi = apply_pauli(state, gen);
      const double c = std::cos(angle / 2);
      const double s = std::sin(angle / 2);
      out.amps = c * state.amps - cd(0, s) * gpsi.amps;
      return out;
    }
    case GateKind::PauliSumExp: {
      const PauliSum& h = g.hamiltonian.value();
      if (h.num_qubits() != state.n)
        throw std::invalid_argument("exponential qubit count differs");
      return evolve_const(state, h, angle);
    }
  }
  throw std::logic_error("unreachable gate kind");
}

StateVector apply_pauli(const StateVector& state, const PauliString& p) {
  if (p.num_qubits() != state.n)
    throw std::invalid_argument("Pauli string qubit count differs from state");
  std::int64_t flip = 0, phase_mask = 0;
  int y_count = 0;
  for (int q = 0; q < state.n; ++q) {
    const std::int64_t bit = qubit_bit(state.n, q);
    switch (p.axes[q]) {
      case Axis::I:
        break;
      case Axis::X:
        flip |= bit;
        break;
      case Axis::Y:
        flip |= bit;
        phase_mask |= bit;
        ++y_count;
        break;
      case Axis::Z:
        phase_mask |= bit;
        break;
    }
  }
  static const cd kPhases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const cd base = kPhases[y_count % 4];
  StateVector out = state;
  for (std::int64_t j = 0; j < state.dim(); ++j) {
    const int parity =
        std::popcount(static_cast<std::uint64_t>(j) &
                      static_cast<std::uint64_t>(phase_mask)) &
        1;
    out.amps(j ^ flip) = (parity ? -base : base) * state.amps(j);
  }
  return out;
}

double expectation(const StateVector& state, const PauliSum& h) {
  if (h.num_qubits() != state.n)
    throw std::invalid_argument("operator qubit count differs from state");
  cd acc(0, 0);
  for (const PauliTerm& t : h.terms()) {
    const StateVector pv = apply_pauli(state, t.string);
    acc += t.coeff * state.amps.dot(pv.amps);
  }
  if (std::abs(acc.imag()) > 1e-10)
    throw std::runtime_error("expectation has non-real residue " +
                             std::to_string(acc.imag()));
  return acc.real();
}

StateVector evolve_const(const StateVector& state, const PauliSum& h,
                         double t) {
  if (h.num_qubits() != state.n)
    throw std::invalid_argument("Hamiltonian qubit count differs from state");
  check_dense_cap(state.n);
  if (h.empty() || t == 0.0) return state;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_dense(h));
  const Eigen::VectorXcd rotated =
      (cd(0, -t) * es.eigenvalues().array()).exp().matrix();
  StateVector out = state;
  out.amps = es.eigenvectors() *
             (rotated.array() *
              (es.eigenvectors().adjoint() * state.amps).array())
                 .matrix();
  return out;
}

Eigen::MatrixXcd evolution_operator(const PauliSum& h, double t) {
  check_dense_cap(h.num_qubits());
  return evolution_operator(to_dense(h), t);
}

Eigen::MatrixXcd evolution_operator(const Eigen::MatrixXcd& herm, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
  const Eigen::VectorXcd rotated =
      (cd(0, -t) * es.eigenvalues().array()).exp().matrix();
  return es.eigenvectors() * rotated.asDiagonal() *
         es.eigenvectors().adjoint();
}

double measure_shots(const StateVector& state, const PauliString& p,
                     std::int64_t shots, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("shots must be at least 1");
  const double exact = expectation(state, PauliSum::single(1.0, p));
  const double p_plus = std::clamp((1.0 + exact) / 2.0, 0.0, 1.0);
  std::mt19937_64 rng = make_rng(seed, {hash_tag("measure")});
  std::int64_t plus = 0;
  for (std::int64_t s = 0; s < shots; ++s)
    if (uniform01(rng) < p_plus) ++plus;
  return static_cast<double>(2 * plus - shots) / static_cast<double>(shots);
}

nlohmann::json state_to_json(const StateVector& state) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::int64_t i = 0; i < state.dim(); ++i)
    arr.push_back({state.amps(i).real(), state.amps(i).imag()});
  return arr;
}

StateVector state_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("state must be a nonempty array");
  const std::uint64_t dim = j.size();
  if (!std::has_single_bit(dim) || dim < 2)
    throw std::invalid_argument("state length must be a power of two >= 2");
  Eigen::VectorXcd amps(static_cast<Eigen::Index>(dim));
  for (std::uint64_t i = 0; i < dim; ++i) {
    const nlohmann::json& pair = j.at(i);
    amps(static_cast<Eigen::Index>(i)) =
        cd(pair.at(0).get<double>(), pair.at(1).get<double>());
  }
  return make_state(std::bit_width(dim) - 1, std::move(amps));
}

}  // namespace varqc
