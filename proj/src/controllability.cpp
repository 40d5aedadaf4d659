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

#include "varqc/controllability.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace varqc {

namespace {

// su(2^n) excludes the identity direction, so the trace component is
// projected out of every generator before the independence test.
PauliSum strip_identity(const PauliSum& s) {
  const int n = s.num_qubits();
  PauliSum out(n);
  const PauliString id = PauliString::identity(n);
  for (const PauliTerm& t : s.terms())
    if (t.string != id) out.add(t.coeff, t.string);
  return out;
}

class Closure {
 public:
  explicit Closure(std::size_t max_elements) : max_elements_(max_elements) {}

  const std::vector<PauliSum>& basis() const { return basis_; }
  bool at_cap() const { return basis_.size() >= max_elements_; }

  // Gram-Schmidt with one re-orthogonalization pass; accepts when the
  // residual keeps more than 1e-10 of the candidate's norm.
  bool offer(PauliSum cand) {
    if (at_cap()) return false;
    const double base = std::sqrt(dot(cand, cand));
    if (base < 1e-12) return false;
    for (int pass = 0; pass < 2; ++pass)
      for (const PauliSum& b : basis_) cand -= dot(b, cand) * b;
    const double rem = std::sqrt(dot(cand, cand));
    if (rem <= 1e-10 * base) return false;
    cand *= 1.0 / rem;
    basis_.push_back(std::move(cand));
    return true;
  }

 private:
  std::size_t max_elements_;
  std::vector<PauliSum> basis_;
};

}  // namespace

LieAlgebraReport dynamical_lie_algebra(const PauliSum& drift,
                                       const std::vector<PauliSum>& controls,
                                       const LieClosureCaps& caps) {
  int n = drift.num_qubits();
  for (const PauliSum& c : controls) {
    if (n == 0) n = c.num_qubits();
    if (c.num_qubits() != n && !(c.num_qubits() == 0 && c.empty()))
      throw std::invalid_argument("generators disagree on qubit count");
  }
  if (n < 1) throw std::invalid_argument("no generator fixes a qubit count");
  if (caps.n_cap < 1 || n > caps.n_cap)
    throw std::invalid_argument("closure supports at most " +
                                std::to_string(caps.n_cap) + " qubits, got " +
                                std::to_string(n));

  LieAlgebraReport report;
  report.n = n;
  report.full_dimension = (std::int64_t{1} << (2 * n)) - 1;

  std::vector<PauliSum> generators;
  {
    PauliSum d = strip_identity(drift);
    if (!d.empty()) generators.push_back(std::move(d));
  }
  for (const PauliSum& c : controls) {
    PauliSum g = strip_identity(c);
    if (!g.empty()) generators.push_back(std::move(g));
  }

  const std::size_t max_elements =
      caps.max_elements > 0
          ? static_cast<std::size_t>(caps.max_elements)
          : static_cast<std::size_t>(report.full_dimension);
  Closure closure(max_elements);
  for (const PauliSum& g : generators) closure.offer(g);

  const bool capped_default = caps.max_elements <= 0;
  bool stabilized = generators.empty();
  while (!stabilized && report.generations < caps.max_rounds) {
    ++report.generations;
    bool added = false;
    const std::size_t count = closure.basis().size();
    for (std::size_t i = 0; i < count && !closure.at_cap(); ++i)
      for (const PauliSum& g : generators) {
        if (closure.offer(commutator(closure.basis()[i], g))) added = true;
        if (closure.at_cap()) break;
      }
    if (!added && !closure.at_cap()) {
      // Generator sweeps stabilized; one pairwise round certifies closure.
      for (std::size_t i = 0; i < count && !closure.at_cap(); ++i)
        for (std::size_t j = i + 1; j < count; ++j) {
          if (closure.offer(
                  commutator(closure.basis()[i], closure.basis()[j])))
            added = true;
          if (closure.at_cap()) break;
        }
      if (!added) stabilized = true;
    }
    if (closure.at_cap()) break;
  }

  report.dimension = static_cast<int>(closure.basis().size());
  report.basis = closure.basis();
  const bool full =
      report.dimension == static_cast<int>(report.full_dimension);
  // Reaching 4^n - 1 orthogonal directions is stabilization by itself; a
  // smaller custom cap or exhausted rounds leaves the closure unresolved.
  report.truncated = !stabilized && !(full && capped_default);
  report.controllable = full && !report.truncated;
  return report;
}

bool is_fully_controllable(const LieAlgebraReport& report) {
  if (report.truncated)
    throw std::logic_error(
        "controllability undetermined: closure was truncated");
  return report.dimension == static_cast<int>(report.full_dimension);
}

}  // namespace varqc
