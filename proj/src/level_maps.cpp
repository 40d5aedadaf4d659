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

#include "varqc/level_maps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace varqc {

namespace {

using cd = std::complex<double>;

constexpr double kPi = std::numbers::pi;

// Effective bound angle of a gate inside a circuit, resolving the
// parameter table. Throws on unbound parameters.
double bound_angle(const Circuit& c, const Gate& g) {
  if (!g.is_parametrized()) return g.angle;
  const int idx = c.param_index(*g.param);
  if (idx < 0 || !c.params[static_cast<std::size_t>(idx)].value)
    throw std::invalid_argument("gate parameter '" + *g.param +
                                "' has no bound value");
  return g.param_scale * *c.params[static_cast<std::size_t>(idx)].value;
}

PulseSchedule segment_schedule(const PulseSegment& seg,
                               std::span<const double> slot_params) {
  PulseSchedule sched;
  const int m = seg.sys.M;
  const int k = seg.sys.num_controls();
  sched.amplitudes.resize(m, k);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j)
      sched.amplitudes(i, j) =
          slot_params[static_cast<std::size_t>(i) * k + j];
  return sched;
}

// chi <- U_segment^dagger chi by applying inverse gates in reverse order.
void reverse_apply_circuit(const Circuit& c, StateVector& chi) {
  const std::vector<double> values = c.bound_values();
  for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) {
    const Gate& g = *it;
    double angle = g.angle;
    if (g.is_parametrized())
      angle = g.param_scale *
              values[static_cast<std::size_t>(c.param_index(*g.param))];
    chi = apply_gate(chi, g, -angle);
  }
}

}  // namespace

Circuit digitize(const ControlSystem& sys, const PulseSchedule& sched,
                 int r) {
  validate_system(sys);
  validate_schedule(sys, sched);
  if (r < 1) throw std::invalid_argument("substep count must be at least 1");
  Circuit c;
  c.n = sys.n;
  const double step = sys.dt() / r;
  for (int m = 0; m < sys.M; ++m) {
    const PauliSum h = slice_hamiltonian(sys, sched, m);
    for (int rep = 0; rep < r; ++rep)
      for (const PauliTerm& t : h.terms())
        c.gates.push_back(Gate::rotation(t.string, 2.0 * step * t.coeff));
  }
  validate_circuit(c);
  return c;
}

GeneratedHamiltonian generate_hamiltonian(const Gate& g, int n) {
  if (g.is_parametrized())
    throw std::invalid_argument("cannot generate a Hamiltonian for a gate "
                                "with the free parameter '" +
                                *g.param + "'");
  switch (g.kind) {
    case GateKind::PauliRotation:
      return GeneratedHamiltonian{
          PauliSum::single(g.angle / 2, *g.generator), 1.0, cd(1, 0)};
    case GateKind::PauliSumExp:
      return GeneratedHamiltonian{g.angle * *g.hamiltonian, 1.0, cd(1, 0)};
    case GateKind::X:
      // exp(-i pi/2 X) = -i X.
      return GeneratedHamiltonian{
          PauliSum::single(kPi / 2,
                           PauliString::single(n, g.qubits.at(0), Axis::X)),
          1.0, cd(0, -1)};
    case GateKind::H: {
      // The gate equals (X+Z)/sqrt(2), itself involutory, so the same
      // half-turn construction applies: exp(-i pi/2 (X+Z)/sqrt2) = -i H.
      const double w = kPi / (2 * std::sqrt(2.0));
      PauliSum gen(n);
      gen.add(w, PauliString::single(n, g.qubits.at(0), Axis::X));
      gen.add(w, PauliString::single(n, g.qubits.at(0), Axis::Z));
      return GeneratedHamiltonian{std::move(gen), 1.0, cd(0, -1)};
    }
    case GateKind::CZ: {
      // CZ = exp(i pi |11><11|); expanding the projector in Z gives the
      // coupling-plus-local form below, with phase exp(i pi/4) left over.
      const int a = g.qubits.at(0);
      const int b = g.qubits.at(1);
      PauliSum gen(n);
      PauliString zz = PauliString::identity(n);
      zz.axes[a] = Axis::Z;
      zz.axes[b] = Axis::Z;
      gen.add(kPi / 4, zz);
      gen.add(-kPi / 4, PauliString::single(n, a, Axis::Z));
      gen.add(-kPi / 4, PauliString::single(n, b, Axis::Z));
      return GeneratedHamiltonian{std::move(gen), 1.0,
                                  std::polar(1.0, kPi / 4)};
    }
  }
  throw std::logic_error("unreachable gate kind");
}

double gate_overlap(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols())
    throw std::invalid_argument("overlap dimensions differ");
  return std::abs((v.adjoint() * u).trace()) / static_cast<double>(u.rows());
}

std::vector<double> HybridAnsatz::initial_params() const {
  std::vector<double> out;
  out.reserve(init.size());
  for (std::size_t i = 0; i < init.size(); ++i) {
    if (!init[i])
      throw std::invalid_argument("parameter '" + param_names[i] +
                                  "' has no initial value");
    out.push_back(*init[i]);
  }
  return out;
}

HybridAnsatz hybridize(const Circuit& c, std::span<const int> selection) {
  validate_circuit(c);
  std::set<int> selected;
  for (int idx : selection) {
    if (idx < 0 || idx >= static_cast<int>(c.gates.size()))
      throw std::invalid_argument("selection index " + std::to_string(idx) +
                                  " out of range");
    selected.insert(idx);
  }

  HybridAnsatz h;
  h.n = c.n;
  std::set<std::string> taken;

  auto register_segment = [&h, &taken](
                              std::vector<std::string> names,
                              std::vector<std::optional<double>> values,
                              HybridSegmentVariant seg) {
    bool collides = false;
    for (const std::string& name : names)
      if (taken.count(name)) collides = true;
    if (collides) {
      const std::string prefix =
          "s" + std::to_string(h.segments.size()) + ".";
      for (std::string& name : names) name = prefix + name;
    }
    const int offset = h.param_count();
    for (std::size_t i = 0; i < names.size(); ++i) {
      taken.insert(names[i]);
      h.param_names.push_back(std::move(names[i]));
      h.init.push_back(values[i]);
    }
    h.slots.emplace_back(offset, static_cast<int>(names.size()));
    h.segments.push_back(std::move(seg));
  };

  auto flush_group = [&](std::vector<Gate>& group) {
    if (group.empty()) return;
    Circuit sub;
    sub.n = c.n;
    std::vector<std::string> names;
    std::vector<std::optional<double>> values;
    for (const Gate& g : group) {
      if (g.is_parametrized()) {
        const int idx = c.param_index(*g.param);
        const ParamEntry& entry = c.params[static_cast<std::size_t>(idx)];
        if (sub.param_index(entry.name) < 0) {
          sub.params.push_back({entry.name, std::nullopt});
          names.push_back(entry.name);
          values.push_back(entry.value);
        }
      }
      sub.gates.push_back(g);
    }
    register_segment(std::move(names), std::move(values),
                     CircuitSegment{std::move(sub)});
    group.clear();
  };

  std::vector<Gate> group;
  for (std::size_t idx = 0; idx < c.gates.size(); ++idx) {
    if (!selected.count(static_cast<int>(idx))) {
      group.push_back(c.gates[idx]);
      continue;
    }
    flush_group(group);
    Gate bound = c.gates[idx];
    bound.angle = bound_angle(c, bound);
    bound.param.reset();
    bound.param_scale = 1.0;
    const GeneratedHamiltonian gen = generate_hamiltonian(bound, c.n);
    PulseSegment seg;
    seg.sys.n = c.n;
    seg.sys.h0 = PauliSum(c.n);
    seg.sys.T = gen.tau;
    seg.sys.M = 1;
    std::vector<std::string> names;
    std::vector<std::optional<double>> values;
    for (const PauliTerm& t : gen.generator.terms()) {
      seg.sys.controls.push_back(PauliSum::single(1.0, t.string));
      names.push_back("g" + std::to_string(idx) + "." + t.string.str());
      values.emplace_back(t.coeff);
    }
    register_segment(std::move(names), std::move(values), std::move(seg));
  }
  flush_group(group);
  if (h.segments.empty()) {
    Circuit empty;
    empty.n = c.n;
    register_segment({}, {}, CircuitSegment{std::move(empty)});
  }
  return h;
}

StateVector evaluate_hybrid(const HybridAnsatz& h,
                            std::span<const double> params,
                            const StateVector& psi0) {
  if (psi0.n != h.n)
    throw std::invalid_argument("initial state qubit count differs");
  if (params.size() != static_cast<std::size_t>(h.param_count()))
    throw std::invalid_argument("expected " +
                                std::to_string(h.param_count()) +
                                " unified parameters, got " +
                                std::to_string(params.size()));
  StateVector psi = psi0;
  for (std::size_t s = 0; s < h.segments.size(); ++s) {
    const auto [offset, count] = h.slots[s];
    const std::span<const double> slot =
        params.subspan(static_cast<std::size_t>(offset),
                       static_cast<std::size_t>(count));
    if (const auto* cs = std::get_if<CircuitSegment>(&h.segments[s])) {
      psi = evaluate_circuit(cs->circuit, slot, psi);
    } else {
      const auto& ps = std::get<PulseSegment>(h.segments[s]);
      psi = propagate_state(ps.sys, segment_schedule(ps, slot), psi);
    }
  }
  return psi;
}

Eigen::MatrixXcd hybrid_unitary(const HybridAnsatz& h,
                                std::span<const double> params) {
  check_dense_cap(h.n);
  const std::int64_t dim = std::int64_t{1} << h.n;
  Eigen::MatrixXcd u(dim, dim);
  for (std::int64_t col = 0; col < dim; ++col)
    u.col(col) =
        evaluate_hybrid(h, params,
                        basis_state(h.n, static_cast<std::uint64_t>(col)))
            .amps;
  return u;
}

std::vector<double> hybrid_gradient(const HybridAnsatz& h, const PauliSum& h_p,
                                    const StateVector& psi0,
                                    std::span<const double> params,
                                    double fd_step) {
  if (h_p.num_qubits() != h.n)
    throw std::invalid_argument("objective qubit count differs");
  if (params.size() != static_cast<std::size_t>(h.param_count()))
    throw std::invalid_argument("unified parameter count mismatch");
  const std::size_t seg_count = h.segments.size();

  // Forward pass: states at segment boundaries.
  std::vector<StateVector> boundary(seg_count + 1);
  boundary[0] = psi0;
  for (std::size_t s = 0; s < seg_count; ++s) {
    const auto [offset, count] = h.slots[s];
    const std::span<const double> slot =
        params.subspan(static_cast<std::size_t>(offset),
                       static_cast<std::size_t>(count));
    if (const auto* cs = std::get_if<CircuitSegment>(&h.segments[s])) {
      boundary[s + 1] = evaluate_circuit(cs->circuit, slot, boundary[s]);
    } else {
      const auto& ps = std::get<PulseSegment>(h.segments[s]);
      boundary[s + 1] =
          propagate_state(ps.sys, segment_schedule(ps, slot), boundary[s]);
    }
  }

  std::vector<double> grad(params.size(), 0.0);

  // Backward pass: costate chi = (downstream)^dagger H_p psi(end).
  StateVector chi{h.n, Eigen::VectorXcd::Zero(boundary[seg_count].dim())};
  for (const PauliTerm& t : h_p.terms())
    chi.amps += t.coeff * apply_pauli(boundary[seg_count], t.string).amps;

  for (std::size_t s = seg_count; s-- > 0;) {
    const auto [offset, count] = h.slots[s];
    const std::span<const double> slot =
        params.subspan(static_cast<std::size_t>(offset),
                       static_cast<std::size_t>(count));
    if (const auto* cs = std::get_if<CircuitSegment>(&h.segments[s])) {
      // Circuit slots are differenced over the full objective below; here
      // only the costate moves through the inverse gates.
      Circuit bound = cs->circuit;
      for (int i = 0; i < count; ++i)
        bound.params[static_cast<std::size_t>(i)].value =
            slot[static_cast<std::size_t>(i)];
      reverse_apply_circuit(bound, chi);
    } else {
      const auto& ps = std::get<PulseSegment>(h.segments[s]);
      const PulseSchedule sched = segment_schedule(ps, slot);
      const double dt = ps.sys.dt();
      const int kc = ps.sys.num_controls();
      std::vector<Eigen::MatrixXcd> hkd;
      hkd.reserve(static_cast<std::size_t>(kc));
      for (const PauliSum& hk : ps.sys.controls) hkd.push_back(to_dense(hk));
      std::vector<Eigen::VectorXcd> states(
          static_cast<std::size_t>(ps.sys.M) + 1);
      std::vector<HermitianEigen> eigs(static_cast<std::size_t>(ps.sys.M));
      states[0] = boundary[s].amps;
      for (int m = 0; m < ps.sys.M; ++m) {
        eigs[static_cast<std::size_t>(m)] = eigen_decompose(
            to_dense(slice_hamiltonian(ps.sys, sched, m)));
        states[static_cast<std::size_t>(m) + 1] =
            evolution_from_eigen(eigs[static_cast<std::size_t>(m)], dt) *
            states[static_cast<std::size_t>(m)];
      }
      for (int m = ps.sys.M - 1; m >= 0; --m) {
        const HermitianEigen& e = eigs[static_cast<std::size_t>(m)];
        for (int k = 0; k < kc; ++k)
          grad[static_cast<std::size_t>(offset) +
               static_cast<std::size_t>(m) * kc + k] =
              exp_derivative_overlap(e, dt, hkd[static_cast<std::size_t>(k)],
                                     chi.amps,
                                     states[static_cast<std::size_t>(m)]);
        chi.amps = evolution_from_eigen(e, -dt) * chi.amps;
      }
    }
  }

  // Central differences for circuit slots.
  std::vector<double> work(params.begin(), params.end());
  auto objective = [&](const std::vector<double>& p) {
    return expectation(evaluate_hybrid(h, p, psi0), h_p);
  };
  for (std::size_t s = 0; s < seg_count; ++s) {
    if (!std::holds_alternative<CircuitSegment>(h.segments[s])) continue;
    const auto [offset, count] = h.slots[s];
    for (int i = 0; i < count; ++i) {
      const std::size_t slot = static_cast<std::size_t>(offset) + i;
      const double saved = work[slot];
      work[slot] = saved + fd_step;
      const double jp = objective(work);
      work[slot] = saved - fd_step;
      const double jm = objective(work);
      work[slot] = saved;
      grad[slot] = (jp - jm) / (2 * fd_step);
    }
  }
  return grad;
}

nlohmann::json hybrid_to_json(const HybridAnsatz& h) {
  nlohmann::json segments = nlohmann::json::array();
  for (const HybridSegmentVariant& seg : h.segments) {
    if (const CircuitSegment* c = std::get_if<CircuitSegment>(&seg))
      segments.push_back({{"circuit", circuit_to_json(c->circuit)}});
    else
      segments.push_back(
          {{"system", system_to_json(std::get<PulseSegment>(seg).sys)}});
  }
  nlohmann::json init = nlohmann::json::array();
  for (const std::optional<double>& v : h.init) {
    if (v)
      init.push_back(*v);
    else
      init.push_back(nullptr);
  }
  nlohmann::json slots = nlohmann::json::array();
  for (const auto& [offset, count] : h.slots)
    slots.push_back({offset, count});
  return nlohmann::json{{"n", h.n},
                        {"segments", std::move(segments)},
                        {"param_names", h.param_names},
                        {"init", std::move(init)},
                        {"slots", std::move(slots)}};
}

HybridAnsatz hybrid_from_json(const nlohmann::json& j) {
  HybridAnsatz h;
  h.n = j.at("n").get<int>();
  for (const nlohmann::json& seg : j.at("segments")) {
    if (seg.contains("circuit"))
      h.segments.push_back(CircuitSegment{circuit_from_json(seg.at("circuit"))});
    else
      h.segments.push_back(PulseSegment{system_from_json(seg.at("system"))});
  }
  h.param_names = j.at("param_names").get<std::vector<std::string>>();
  for (const nlohmann::json& v : j.at("init")) {
    if (v.is_null())
      h.init.push_back(std::nullopt);
    else
      h.init.push_back(v.get<double>());
  }
  for (const nlohmann::json& s : j.at("slots"))
    h.slots.emplace_back(s.at(0).get<int>(), s.at(1).get<int>());
  if (h.param_names.size() != h.init.size())
    throw std::invalid_argument("parameter name and init lengths disagree");
  if (h.slots.size() != h.segments.size())
    throw std::invalid_argument("slot and segment counts disagree");
  int expected = 0;
  for (std::size_t s = 0; s < h.slots.size(); ++s) {
    if (h.slots[s].first != expected || h.slots[s].second < 0)
      throw std::invalid_argument("slot ranges must tile the parameter list");
    expected += h.slots[s].second;
  }
  if (expected != h.param_count())
    throw std::invalid_argument("slot ranges must tile the parameter list");
  return h;
}

}  // namespace varqc
