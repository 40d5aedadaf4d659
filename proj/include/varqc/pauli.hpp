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

#ifndef VARQC_PAULI_HPP_
#define VARQC_PAULI_HPP_

#include <Eigen/Dense>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace varqc {

// Coefficients with magnitude below this are dropped during canonicalization.
inline constexpr double kCoeffTol = 1e-12;

enum class Axis : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char axis_char(Axis a);
Axis axis_from_char(char c);  // throws std::invalid_argument on other chars

// Tensor product of single-qubit Pauli operators. axes[q] acts on qubit q;
// qubit 0 is the leftmost tensor factor and the most significant bit of the
// computational-basis index. This convention is shared project-wide.
struct PauliString {
  std::vector<Axis> axes;

  int num_qubits() const { return static_cast<int>(axes.size()); }
  int weight() const;
  bool is_identity() const { return weight() == 0; }
  std::string str() const;

  static PauliString identity(int n);
  static PauliString single(int n, int qubit, Axis a);
  static PauliString parse(std::string_view text);

  auto operator<=>(const PauliString&) const = default;
};

// a * b = i^phase_power * string, phase_power in {0, 1, 2, 3}.
struct PauliProduct {
  int phase_power;
  PauliString string;
};

PauliProduct pauli_mul(const PauliString& a, const PauliString& b);

// True iff a and b commute (even number of sites with distinct non-identity
// axes).
bool commutes(const PauliString& a, const PauliString& b);

struct PauliTerm {
  double coeff;
  PauliString string;

  bool operator==(const PauliTerm&) const = default;
};

// Real-weighted sum of Pauli strings; the dense realization is Hermitian.
// Always canonical: terms sorted lexicographically by axes, duplicates
// merged, coefficients below kCoeffTol dropped. The same type also carries
// Lie-algebra elements i*A with the imaginary unit absorbed, so anti-
// Hermitian commutator results stay real-weighted.
class PauliSum {
 public:
  PauliSum() = default;
  explicit PauliSum(int n) : n_(n) {}
  PauliSum(int n, std::vector<PauliTerm> terms);

  static PauliSum single(double coeff, PauliString s);

  int num_qubits() const { return n_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  // Merging insert; keeps the canonical invariant.
  void add(double coeff, const PauliString& s);
  double coeff_of(const PauliString& s) const;

  PauliSum& operator+=(const PauliSum& o);
  PauliSum& operator-=(const PauliSum& o);
  PauliSum& operator*=(double c);

  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(double c, PauliSum s) { return s *= c; }

  bool operator==(const PauliSum&) const = default;

 private:
  int n_ = 0;
  std::vector<PauliTerm> terms_;
};

// Returns C with [A, B] = i*C; C is real-weighted because A, B are
// Hermitian. Commuting inputs give the empty sum.
PauliSum commutator(const PauliSum& a, const PauliSum& b);

// Hilbert-Schmidt inner product tr(A B)/2^n; Pauli strings are orthonormal
// under it, so this is a coefficient dot product.
double dot(const PauliSum& a, const PauliSum& b);

// Sum of absolute coefficients.
double lambda_norm(const PauliSum& h);

// Cap on qubit count for dense realizations; default 12 (matrix side 4096,
// about 256 MiB), overridable via the VARQC_DENSE_CAP environment variable
// or set_dense_qubit_cap.
int dense_qubit_cap();
void set_dense_qubit_cap(int cap);
// Throws ResourceLimitError with a memory estimate if n exceeds the cap.
void check_dense_cap(int n);

Eigen::MatrixXcd to_dense(const PauliString& s);
Eigen::MatrixXcd to_dense(const PauliSum& h);

// Text format: one `<coefficient> <axes>` term per line, `#` starts a
// comment, blank lines ignored; n inferred from the first term. Throws
// ParseError with 1-based line/column on malformed input.
PauliSum parse_pauli_sum(std::istream& in);
PauliSum parse_pauli_sum(const std::string& text);
std::string to_text(const PauliSum& h);

// Round-trip-exact decimal rendering shared by every artifact writer.
std::string format_double(double v);

}  // namespace varqc

#endif  // VARQC_PAULI_HPP_
