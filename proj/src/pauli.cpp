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

#include "varqc/pauli.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "varqc/errors.hpp"

namespace varqc {

namespace {

using cd = std::complex<double>;

const cd kPhases[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};

}  // namespace

char axis_char(Axis a) {
  static constexpr char kChars[4] = {'I', 'X', 'Y', 'Z'};
  return kChars[static_cast<int>(a)];
}

Axis axis_from_char(char c) {
  switch (c) {
    case 'I':
      return Axis::I;
    case 'X':
      return Axis::X;
    case 'Y':
      return Axis::Y;
    case 'Z':
      return Axis::Z;
    default:
      throw std::invalid_argument(std::string("invalid Pauli axis '") + c +
                                  "', expected one of I, X, Y, Z");
  }
}

int PauliString::weight() const {
  int w = 0;
  for (Axis a : axes)
    if (a != Axis::I) ++w;
  return w;
}

std::string PauliString::str() const {
  std::string s;
  s.reserve(axes.size());
  for (Axis a : axes) s.push_back(axis_char(a));
  return s;
}

PauliString PauliString::identity(int n) {
  if (n <= 0) throw std::invalid_argument("qubit count must be positive");
  return PauliString{std::vector<Axis>(n, Axis::I)};
}

PauliString PauliString::single(int n, int qubit, Axis a) {
  PauliString s = identity(n);
  if (qubit < 0 || qubit >= n)
    throw std::invalid_argument("qubit index out of range");
  s.axes[qubit] = a;
  return s;
}

PauliString PauliString::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty Pauli string");
  PauliString s;
  s.axes.reserve(text.size());
  for (char c : text) s.axes.push_back(axis_from_char(c));
  return s;
}

PauliProduct pauli_mul(const PauliString& a, const PauliString& b) {
  if (a.num_qubits() != b.num_qubits())
    throw std::invalid_argument("pauli_mul: qubit counts differ");
  PauliProduct out{0, PauliString{std::vector<Axis>(a.axes.size(), Axis::I)}};
  for (std::size_t q = 0; q < a.axes.size(); ++q) {
    const int x = static_cast<int>(a.axes[q]);
    const int y = static_cast<int>(b.axes[q]);
    if (x == 0) {
      out.string.axes[q] = b.axes[q];
    } else if (y == 0) {
      out.string.axes[q] = a.axes[q];
    } else if (x == y) {
      out.string.axes[q] = Axis::I;
    } else {
      // Distinct non-identity axes multiply to the third one. XY = iZ,
      // YZ = iX, ZX = iY; the reverse orders pick up -i.
      out.string.axes[q] = static_cast<Axis>(6 - x - y);
      const bool cyclic = (y - x + 3) % 3 == 1;
      out.phase_power = (out.phase_power + (cyclic ? 1 : 3)) % 4;
    }
  }
  return out;
}

bool commutes(const PauliString& a, const PauliString& b) {
  if (a.num_qubits() != b.num_qubits())
    throw std::invalid_argument("commutes: qubit counts differ");
  int anti = 0;
  for (std::size_t q = 0; q < a.axes.size(); ++q) {
    if (a.axes[q] != Axis::I && b.axes[q] != Axis::I && a.axes[q] != b.axes[q])
      ++anti;
  }
  return anti % 2 == 0;
}

PauliSum::PauliSum(int n, std::vector<PauliTerm> terms)
    : n_(n), terms_(std::move(terms)) {
  for (const PauliTerm& t : terms_) {
    if (t.string.num_qubits() != n_)
      throw std::invalid_argument("PauliSum: term qubit count differs from n");
  }
  std::sort(terms_.begin(), terms_.end(),
            [](const PauliTerm& a, const PauliTerm& b) {
              return a.string < b.string;
            });
  std::vector<PauliTerm> merged;
  merged.reserve(terms_.size());
  for (PauliTerm& t : terms_) {
    if (!merged.empty() && merged.back().string == t.string)
      merged.back().coeff += t.coeff;
    else
      merged.push_back(std::move(t));
  }
  std::erase_if(merged,
                [](const PauliTerm& t) { return std::abs(t.coeff) < kCoeffTol; });
  terms_ = std::move(merged);
}

PauliSum PauliSum::single(double coeff, PauliString s) {
  const int n = s.num_qubits();
  return PauliSum(n, {PauliTerm{coeff, std::move(s)}});
}

void PauliSum::add(double coeff, const PauliString& s) {
  if (s.num_qubits() != n_)
    throw std::invalid_argument("PauliSum::add: qubit count differs from n");
  auto it = std::lower_bound(terms_.begin(), terms_.end(), s,
                             [](const PauliTerm& t, const PauliString& key) {
                               return t.string < key;
                             });
  if (it != terms_.end() && it->string == s) {
    it->coeff += coeff;
    if (std::abs(it->coeff) < kCoeffTol) terms_.erase(it);
  } else if (std::abs(coeff) >= kCoeffTol) {
    terms_.insert(it, PauliTerm{coeff, s});
  }
}

double PauliSum::coeff_of(const PauliString& s) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), s,
                             [](const PauliTerm& t, const PauliString& key) {
                               return t.string < key;
                             });
  if (it != terms_.end() && it->string == s) return it->coeff;
  return 0.0;
}

PauliSum& PauliSum::operator+=(const PauliSum& o) {
  if (n_ == 0 && terms_.empty()) n_ = o.n_;
  if (o.n_ != n_)
    throw std::invalid_argument("PauliSum: qubit counts differ in addition");
  for (const PauliTerm& t : o.terms_) add(t.coeff, t.string);
  return *this;
}

PauliSum& PauliSum::operator-=(const PauliSum& o) {
  if (n_ == 0 && terms_.empty()) n_ = o.n_;
  if (o.n_ != n_)
    throw std::invalid_argument("PauliSum: qubit counts differ in subtraction");
  for (const PauliTerm& t : o.terms_) add(-t.coeff, t.string);
  return *this;
}

PauliSum& PauliSum::operator*=(double c) {
  for (PauliTerm& t : terms_) t.coeff *= c;
  std::erase_if(terms_,
                [](const PauliTerm& t) { return std::abs(t.coeff) < kCoeffTol; });
  return *this;
}

PauliSum commutator(const PauliSum& a, const PauliSum& b) {
  if (a.num_qubits() != b.num_qubits())
    throw std::invalid_argument("commutator: qubit counts differ");
  std::vector<PauliTerm> out;
  for (const PauliTerm& ta : a.terms()) {
    for (const PauliTerm& tb : b.terms()) {
      if (commutes(ta.string, tb.string)) continue;
      // For anticommuting strings [P,Q] = 2 i^k R with k odd, so
      // [A,B] = i*C picks up coefficient 2*alpha*beta*Im(i^k) on R.
      PauliProduct p = pauli_mul(ta.string, tb.string);
      const double sign = (p.phase_power % 4 == 1) ? 1.0 : -1.0;
      out.push_back(
          PauliTerm{2.0 * ta.coeff * tb.coeff * sign, std::move(p.string)});
    }
  }
  return PauliSum(a.num_qubits(), std::move(out));
}

double dot(const PauliSum& a, const PauliSum& b) {
  if (a.num_qubits() != b.num_qubits())
    throw std::invalid_argument("dot: qubit counts differ");
  double acc = 0.0;
  auto ia = a.terms().begin();
  auto ib = b.terms().begin();
  while (ia != a.terms().end() && ib != b.terms().end()) {
    if (ia->string < ib->string) {
      ++ia;
    } else if (ib->string < ia->string) {
      ++ib;
    } else {
      acc += ia->coeff * ib->coeff;
      ++ia;
      ++ib;
    }
  }
  return acc;
}

double lambda_norm(const PauliSum& h) {
  double acc = 0.0;
  for (const PauliTerm& t : h.terms()) acc += std::abs(t.coeff);
  return acc;
}

namespace {

std::atomic<int> g_dense_cap{[] {
  if (const char* env = std::getenv("VARQC_DENSE_CAP")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 30)
      return static_cast<int>(v);
  }
  return 12;
}()};

}  // namespace

int dense_qubit_cap() { return g_dense_cap.load(); }

void set_dense_qubit_cap(int cap) {
  if (cap < 1) throw std::invalid_argument("dense cap must be positive");
  g_dense_cap.store(cap);
}

void check_dense_cap(int n) {
  const int cap = dense_qubit_cap();
  if (n > cap) {
    const double mib =
        16.0 * std::pow(2.0, 2.0 * n) / (1024.0 * 1024.0);
    std::ostringstream msg;
    msg << "n=" << n << " exceeds the dense qubit cap " << cap << " (a "
        << (1LL << n) << "x" << (1LL << n) << " complex matrix needs about "
        << static_cast<long long>(std::ceil(mib))
        << " MiB); raise VARQC_DENSE_CAP to override";
    throw ResourceLimitError(msg.str());
  }
}

Eigen::MatrixXcd to_dense(const PauliString& s) {
  const int n = s.num_qubits();
  check_dense_cap(n);
  const std::int64_t dim = std::int64_t{1} << n;
  // Each string is a signed permutation with phase i^{#Y}; fill one entry
  // per column instead of forming a Kronecker chain.
  std::uint64_t flip = 0, phase_mask = 0;
  int y_count = 0;
  for (int q = 0; q < n; ++q) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
    switch (s.axes[q]) {
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
  const cd base = kPhases[y_count % 4];
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::int64_t col = 0; col < dim; ++col) {
    const int parity =
        std::popcount(static_cast<std::uint64_t>(col) & phase_mask) & 1;
    m(col ^ static_cast<std::int64_t>(flip), col) =
        parity ? -base : base;
  }
  return m;
}

Eigen::MatrixXcd to_dense(const PauliSum& h) {
  const int n = h.num_qubits();
  check_dense_cap(n);
  const std::int64_t dim = std::int64_t{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const PauliTerm& t : h.terms()) m += t.coeff * to_dense(t.string);
  return m;
}

PauliSum parse_pauli_sum(std::istream& in) {
  std::vector<PauliTerm> terms;
  int n = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;

    const std::size_t coeff_col = pos + 1;
    const std::size_t coeff_end = line.find_first_of(" \t\r", pos);
    const std::string coeff_tok =
        line.substr(pos, coeff_end == std::string::npos ? std::string::npos
                                                        : coeff_end - pos);
    std::size_t parsed = 0;
    double coeff = 0.0;
    try {
      coeff = std::stod(coeff_tok, &parsed);
    } catch (const std::exception&) {
      throw ParseError("expected a real coefficient, got '" + coeff_tok + "'",
                       lineno, static_cast<int>(coeff_col));
    }
    if (parsed != coeff_tok.size())
      throw ParseError("expected a real coefficient, got '" + coeff_tok + "'",
                       lineno, static_cast<int>(coeff_col));

    pos = line.find_first_not_of(" \t\r",
                                 coeff_end == std::string::npos ? line.size()
                                                                : coeff_end);
    if (pos == std::string::npos)
      throw ParseError("missing axes string after coefficient", lineno,
                       static_cast<int>(line.size() + 1));
    const std::size_t axes_col = pos + 1;
    const std::size_t axes_end = line.find_first_of(" \t\r", pos);
    const std::string axes_tok =
        line.substr(pos, axes_end == std::string::npos ? std::string::npos
                                                       : axes_end - pos);
    if (axes_end != std::string::npos &&
        line.find_first_not_of(" \t\r", axes_end) != std::string::npos)
      throw ParseError("unexpected trailing text after axes string", lineno,
                       static_cast<int>(line.find_first_not_of(" \t\r",
                                                               axes_end) +
                                        1));

    PauliString s;
    try {
      s = PauliString::parse(axes_tok);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), lineno, static_cast<int>(axes_col));
    }
    if (n == 0) {
      n = s.num_qubits();
    } else if (s.num_qubits() != n) {
      throw ParseError("axes string has length " +
                           std::to_string(s.num_qubits()) +
                           " but earlier terms have length " +
                           std::to_string(n),
                       lineno, static_cast<int>(axes_col));
    }
    terms.push_back(PauliTerm{coeff, std::move(s)});
  }
  if (n == 0) throw ParseError("no terms found", std::max(lineno, 1));
  return PauliSum(n, std::move(terms));
}

PauliSum parse_pauli_sum(const std::string& text) {
  std::istringstream ss(text);
  return parse_pauli_sum(ss);
}

std::string to_text(const PauliSum& h) {
  std::string out;
  for (const PauliTerm& t : h.terms()) {
    out += format_double(t.coeff);
    out += ' ';
    out += t.string.str();
    out += '\n';
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace varqc
