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

#include "varqc/circuit.hpp"

#include <algorithm>
#include <iostream>
#include <set>
#include <stdexcept>

namespace varqc {

namespace {

const char* kind_token(GateKind k) {
  switch (k) {
    case GateKind::H:
      return "h";
    case GateKind::X:
      return "x";
    case GateKind::CZ:
      return "cz";
    case GateKind::PauliRotation:
      return "pauli_rotation";
    case GateKind::PauliSumExp:
      return "pauli_sum_exp";
  }
  return "?";
}

GateKind kind_from_token(const std::string& s) {
  if (s == "h") return GateKind::H;
  if (s == "x") return GateKind::X;
  if (s == "cz") return GateKind::CZ;
  if (s == "pauli_rotation") return GateKind::PauliRotation;
  if (s == "pauli_sum_exp") return GateKind::PauliSumExp;
  throw std::invalid_argument("unknown gate kind '" + s + "'");
}

double resolve_angle(const Circuit& c, const Gate& g,
                     std::span<const double> values) {
  if (!g.is_parametrized()) return g.angle;
  const int idx = c.param_index(*g.param);
  if (idx < 0)
    throw std::invalid_argument("gate references unknown parameter '" +
                                *g.param + "'");
  return g.param_scale * values[static_cast<std::size_t>(idx)];
}

}  // namespace

int Circuit::param_index(const std::string& name) const {
  for (std::size_t i = 0; i < params.size(); ++i)
    if (params[i].name == name) return static_cast<int>(i);
  return -1;
}

void Circuit::bind(const std::string& name, double value) {
  const int idx = param_index(name);
  if (idx < 0)
    throw std::invalid_argument("unknown parameter '" + name + "'");
  params[static_cast<std::size_t>(idx)].value = value;
}

std::vector<double> Circuit::bound_values() const {
  std::vector<double> v;
  v.reserve(params.size());
  for (const ParamEntry& p : params) {
    if (!p.value)
      throw std::invalid_argument("parameter '" + p.name + "' is unbound");
    v.push_back(*p.value);
  }
  return v;
}

void validate_circuit(const Circuit& c) {
  if (c.n <= 0) throw std::invalid_argument("circuit qubit count must be positive");
  {
    std::set<std::string> seen;
    for (const ParamEntry& p : c.params)
      if (!seen.insert(p.name).second)
        throw std::invalid_argument("duplicate parameter '" + p.name + "'");
  }
  for (const Gate& g : c.gates) {
    for (int q : g.qubits)
      if (q < 0 || q >= c.n)
        throw std::invalid_argument("gate qubit index out of range");
    if (g.qubits.size() == 2 && g.qubits[0] == g.qubits[1])
      throw std::invalid_argument("gate qubits must be distinct");
    if (g.kind == GateKind::PauliRotation &&
        (!g.generator || g.generator->num_qubits() != c.n))
      throw std::invalid_argument("rotation generator does not match n");
    if (g.kind == GateKind::PauliSumExp &&
        (!g.hamiltonian || g.hamiltonian->num_qubits() != c.n))
      throw std::invalid_argument("exponential generator does not match n");
    if (g.is_parametrized() && c.param_index(*g.param) < 0)
      throw std::invalid_argument("gate references unknown parameter '" +
                                  *g.param + "'");
  }
}

StateVector evaluate_circuit(const Circuit& c, std::span<const double> values,
                             const StateVector& psi0) {
  if (psi0.n != c.n)
    throw std::invalid_argument("initial state qubit count differs");
  if (values.size() != c.params.size())
    throw std::invalid_argument("expected " + std::to_string(c.params.size()) +
                                " parameter values, got " +
                                std::to_string(values.size()));
  StateVector psi = psi0;
  for (const Gate& g : c.gates)
    psi = apply_gate(psi, g, resolve_angle(c, g, values));
  return psi;
}

StateVector evaluate_circuit(const Circuit& c, const StateVector& psi0) {
  const std::vector<double> values = c.bound_values();
  return evaluate_circuit(c, values, psi0);
}

Eigen::MatrixXcd circuit_unitary(const Circuit& c,
                                 std::span<const double> values) {
  check_dense_cap(c.n);
  const std::int64_t dim = std::int64_t{1} << c.n;
  Eigen::MatrixXcd u(dim, dim);
  for (std::int64_t col = 0; col < dim; ++col)
    u.col(col) = evaluate_circuit(c, values,
                                  basis_state(c.n,
                                              static_cast<std::uint64_t>(col)))
                     .amps;
  return u;
}

Eigen::MatrixXcd circuit_unitary(const Circuit& c) {
  const std::vector<double> values = c.bound_values();
  return circuit_unitary(c, values);
}

bool mutually_commuting(const PauliSum& h) {
  const auto& terms = h.terms();
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = i + 1; j < terms.size(); ++j)
      if (!commutes(terms[i].string, terms[j].string)) return false;
  return true;
}

Circuit build_qaoa(const PauliSum& h_p, const PauliSum& h_d, int p,
                   std::span<const double> betas,
                   std::span<const double> gammas) {
  if (h_p.num_qubits() != h_d.num_qubits())
    throw std::invalid_argument("problem and driver qubit counts differ");
  if (p < 1) throw std::invalid_argument("round count must be at least 1");
  if (betas.size() != static_cast<std::size_t>(p) ||
      gammas.size() != static_cast<std::size_t>(p))
    throw std::invalid_argument("need exactly p beta and p gamma values");
  if (commutator(h_p, h_d).empty())
    std::cerr << "warning: driver Hamiltonian commutes with the problem "
                 "Hamiltonian; the ansatz cannot leave the initial "
                 "eigenbasis\n";

  Circuit c;
  c.n = h_p.num_qubits();
  const bool p_splits = mutually_commuting(h_p);
  const bool d_splits = mutually_commuting(h_d);
  // The rotation convention exp(-i angle/2 G) needs angle = 2*coeff*value
  // per term so each factor equals exp(-i value * coeff G).
  auto emit = [&c](const PauliSum& h, const std::string& name, bool split) {
    if (split) {
      for (const PauliTerm& t : h.terms())
        c.gates.push_back(Gate::rotation(t.string, name, 2.0 * t.coeff));
    } else {
      c.gates.push_back(Gate::sum_exp(h, name, 1.0));
    }
  };
  for (int j = 1; j <= p; ++j) {
    const std::string gamma = "gamma_" + std::to_string(j);
    const std::string beta = "beta_" + std::to_string(j);
    c.params.push_back({gamma, gammas[static_cast<std::size_t>(j - 1)]});
    c.params.push_back({beta, betas[static_cast<std::size_t>(j - 1)]});
    emit(h_p, gamma, p_splits);
    emit(h_d, beta, d_splits);
  }
  validate_circuit(c);
  return c;
}

Circuit build_hardware_efficient(int n, int layers,
                                 std::span<const double> params) {
  if (n < 1) throw std::invalid_argument("qubit count must be positive");
  if (layers < 1) throw std::invalid_argument("layer count must be positive");
  if (params.size() != static_cast<std::size_t>(n) * layers)
    throw std::invalid_argument("expected " + std::to_string(n * layers) +
                                " parameter values, got " +
                                std::to_string(params.size()));
  Circuit c;
  c.n = n;
  for (int l = 0; l < layers; ++l) {
    for (int q = 0; q < n; ++q) {
      const std::string name =
          "theta_" + std::to_string(l) + "_" + std::to_string(q);
      c.params.push_back(
          {name, params[static_cast<std::size_t>(l) * n + q]});
      c.gates.push_back(
          Gate::rotation(PauliString::single(n, q, Axis::Y), name));
    }
    for (int q = 0; q + 1 < n; ++q) c.gates.push_back(Gate::cz(q, q + 1));
  }
  validate_circuit(c);
  return c;
}

Circuit build_h2_circuit(double theta) {
  Circuit c;
  c.n = 4;
  c.params.push_back({"theta", theta});
  c.gates.push_back(Gate::rotation(PauliString::single(4, 0, Axis::Y), "theta"));
  c.gates.push_back(Gate::h(1));
  c.gates.push_back(Gate::x(2));
  c.gates.push_back(Gate::x(3));
  c.gates.push_back(Gate::cz(0, 1));
  c.gates.push_back(Gate::h(1));
  c.gates.push_back(Gate::h(2));
  c.gates.push_back(Gate::cz(1, 2));
  c.gates.push_back(Gate::h(2));
  c.gates.push_back(Gate::h(3));
  c.gates.push_back(Gate::cz(2, 3));
  c.gates.push_back(Gate::h(3));
  validate_circuit(c);
  return c;
}

nlohmann::json circuit_to_json(const Circuit& c) {
  nlohmann::json j;
  j["n"] = c.n;
  j["gates"] = nlohmann::json::array();
  for (const Gate& g : c.gates) {
    nlohmann::json gj;
    gj["kind"] = kind_token(g.kind);
    if (!g.qubits.empty()) gj["qubits"] = g.qubits;
    if (g.generator) gj["generator"] = g.generator->str();
    if (g.hamiltonian) {
      nlohmann::json terms = nlohmann::json::array();
      for (const PauliTerm& t : g.hamiltonian->terms())
        terms.push_back({t.coeff, t.string.str()});
      gj["terms"] = terms;
    }
    if (g.is_parametrized()) {
      gj["param"] = *g.param;
      if (g.param_scale != 1.0) gj["scale"] = g.param_scale;
    } else if (g.kind == GateKind::PauliRotation ||
               g.kind == GateKind::PauliSumExp) {
      gj["angle"] = g.angle;
    }
    j["gates"].push_back(std::move(gj));
  }
  j["params"] = nlohmann::json::array();
  for (const ParamEntry& p : c.params) {
    if (p.value)
      j["params"].push_back({{"name", p.name}, {"value", *p.value}});
    else
      j["params"].push_back({{"name", p.name}});
  }
  return j;
}

Circuit circuit_from_json(const nlohmann::json& j) {
  Circuit c;
  c.n = j.at("n").get<int>();
  if (j.contains("params")) {
    for (const nlohmann::json& pj : j.at("params")) {
      if (pj.is_string()) {
        c.params.push_back({pj.get<std::string>(), std::nullopt});
      } else {
        ParamEntry e{pj.at("name").get<std::string>(), std::nullopt};
        if (pj.contains("value")) e.value = pj.at("value").get<double>();
        c.params.push_back(std::move(e));
      }
    }
  }
  for (const nlohmann::json& gj : j.at("gates")) {
    Gate g;
    g.kind = kind_from_token(gj.at("kind").get<std::string>());
    if (gj.contains("qubits"))
      g.qubits = gj.at("qubits").get<std::vector<int>>();
    if (g.kind == GateKind::PauliRotation)
      g.generator = PauliString::parse(gj.at("generator").get<std::string>());
    if (g.kind == GateKind::PauliSumExp) {
      std::vector<PauliTerm> terms;
      for (const nlohmann::json& tj : gj.at("terms"))
        terms.push_back(PauliTerm{
            tj.at(0).get<double>(),
            PauliString::parse(tj.at(1).get<std::string>())});
      g.hamiltonian = PauliSum(c.n, std::move(terms));
    }
    if (gj.contains("param")) {
      g.param = gj.at("param").get<std::string>();
      g.param_scale = gj.value("scale", 1.0);
    } else if (gj.contains("angle")) {
      g.angle = gj.at("angle").get<double>();
    }
    c.gates.push_back(std::move(g));
  }
  validate_circuit(c);
  return c;
}

}  // namespace varqc
