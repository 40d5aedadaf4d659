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

#ifndef VARQC_CONTROLLABILITY_HPP_
#define VARQC_CONTROLLABILITY_HPP_

#include <cstdint>
#include <vector>

#include "varqc/pauli.hpp"

namespace varqc {

// Limits for the commutator closure. The element cap defaults to 4^n - 1,
// the dimension of su(2^n), which is also the natural stopping point.
struct LieClosureCaps {
  int n_cap = 5;
  int max_rounds = 64;
  int max_elements = 0;  // 0 selects the 4^n - 1 default
};

// Result of closing {i*drift, i*controls} under commutators. Basis elements
// are unit-norm, identity-free, and pairwise orthogonal under the
// Hilbert-Schmidt inner product; dimension counts su(2^n) directions only,
// never the identity. A truncated report hit a cap before stabilizing, so
// its dimension is a lower bound and controllable is forced to false.
struct LieAlgebraReport {
  int n = 0;
  int dimension = 0;
  std::int64_t full_dimension = 0;
  bool controllable = false;
  std::vector<PauliSum> basis;
  int generations = 0;
  bool truncated = false;
};

// Builds the dynamical Lie algebra of a control system by breadth-first
// commutator sweeps in the Pauli coefficient representation. Each round
// commutes the current basis with the original generators; a round that
// adds nothing is verified by one pairwise basis round before the closure
// is declared stable. Throws std::invalid_argument on mismatched qubit
// counts or n above caps.n_cap.
LieAlgebraReport dynamical_lie_algebra(const PauliSum& drift,
                                       const std::vector<PauliSum>& controls,
                                       const LieClosureCaps& caps = {});

// True iff the closed algebra is all of su(2^n). Throws std::logic_error
// when the report is truncated, since the answer is then undetermined.
bool is_fully_controllable(const LieAlgebraReport& report);

}  // namespace varqc

#endif  // VARQC_CONTROLLABILITY_HPP_
