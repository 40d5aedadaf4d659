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

#include "varqc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include <Eigen/Dense>

#include "CLI11.hpp"
#include "varqc/circuit.hpp"
#include "varqc/controllability.hpp"
#include "varqc/driver.hpp"
#include "varqc/errors.hpp"
#include "varqc/landscape.hpp"
#include "varqc/level_maps.hpp"
#include "varqc/pauli.hpp"
#include "varqc/pulse.hpp"
#include "varqc/state.hpp"

namespace varqc {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Vqe:
      return "vqe";
    case ExperimentKind::Qaoa:
      return "qaoa";
    case ExperimentKind::Pulse:
      return "pulse";
    case ExperimentKind::Hybrid:
      return "hybrid";
    case ExperimentKind::DigitizeStudy:
      return "digitize-study";
    case ExperimentKind::Controllability:
      return "controllability";
    case ExperimentKind::LandscapeScan:
      return "landscape-scan";
  }
  return "unknown";
}

std::string to_string(const Diagnostic& d) { return d.field + ": " + d.message; }

namespace {

// ---------------------------------------------------------------------
// Config-file parsing
// ---------------------------------------------------------------------

// Line/column of a byte offset inside a text blob, both 1-based.
std::pair<int, int> locate(const std::string& text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' &&
        c != '.')
      return false;
  return true;
}

std::string trim(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && is_space(s[i])) ++i;
  return s.substr(i);
}

// Cuts at the first '#' outside of double quotes.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

json parse_value(const std::string& text, int lineno, int col_base) {
  const char c0 = text.front();
  const bool must_be_json = c0 == '"' || c0 == '[' || c0 == '{' || c0 == '-' ||
                            std::isdigit(static_cast<unsigned char>(c0)) != 0 ||
                            text == "true" || text == "false" || text == "null";
  if (!must_be_json) return json(text);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const int col =
        col_base + static_cast<int>(std::min<std::size_t>(e.byte, text.size()));
    throw ParseError("malformed value: " + std::string(e.what()), lineno, col);
  }
}

std::map<std::string, json> flatten_json_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = locate(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(std::string(e.what()), line, col);
  }
  if (!root.is_object())
    throw ParseError("config root must be an object", 1, 1);
  std::map<std::string, json> out;
  for (const auto& [key, value] : root.items()) {
    if (value.is_object()) {
      for (const auto& [sub, inner] : value.items())
        out[key + "." + sub] = inner;
    } else {
      out[key] = value;
    }
  }
  return out;
}

}  // namespace

std::map<std::string, json> parse_config_text(const std::string& text) {
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{')
    return flatten_json_config(text);

  std::map<std::string, json> out;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("unterminated section header", lineno,
                         static_cast<int>(line.size()));
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_key(section) || section.find('.') != std::string::npos)
        throw ParseError("invalid section name '" + section + "'", lineno);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value'", lineno);
    const std::string key = trim(line.substr(0, eq));
    if (!valid_key(key))
      throw ParseError("invalid key '" + key + "'", lineno);
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ParseError("missing value for '" + key + "'", lineno);
    const std::string full = section.empty() ? key : section + "." + key;
    if (out.count(full))
      throw ParseError("duplicate key '" + full + "'", lineno);
    // Column of the value's first character in the raw line, for error
    // reporting inside JSON values.
    const int col_base = static_cast<int>(raw.find(value));
    out[full] = parse_value(value, lineno, col_base >= 0 ? col_base : 0);
  }
  return out;
}

std::map<std::string, json> parse_config_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
    return flatten_json_config(text);
  return parse_config_text(text);
}

namespace {

// ---------------------------------------------------------------------
// Schema interpretation with full diagnostics
// ---------------------------------------------------------------------

class Reader {
 public:
  explicit Reader(std::map<std::string, json> raw) : raw_(std::move(raw)) {}

  std::vector<Diagnostic>& diags() { return diags_; }
  void add(const std::string& field, const std::string& message) {
    diags_.push_back({field, message});
  }

  std::optional<json> take(const std::string& key) {
    auto it = raw_.find(key);
    if (it == raw_.end()) return std::nullopt;
    json v = std::move(it->second);
    raw_.erase(it);
    return v;
  }

  std::optional<std::string> take_string(const std::string& key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      add(key, "expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<double> take_number(const std::string& key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      add(key, "expected a number");
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<std::int64_t> take_int(const std::string& key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) {
      add(key, "expected an integer");
      return std::nullopt;
    }
    return v->get<std::int64_t>();
  }

  std::optional<std::vector<std::int64_t>> take_int_list(
      const std::string& key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    if (!v->is_array()) {
      add(key, "expected an array of integers");
      return std::nullopt;
    }
    std::vector<std::int64_t> out;
    for (const json& e : *v) {
      if (!e.is_number_integer()) {
        add(key, "expected an array of integers");
        return std::nullopt;
      }
      out.push_back(e.get<std::int64_t>());
    }
    return out;
  }

  std::optional<std::vector<double>> take_number_list(const std::string& key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    if (!v->is_array()) {
      add(key, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (const json& e : *v) {
      if (!e.is_number()) {
        add(key, "expected an array of numbers");
        return std::nullopt;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::optional<std::vector<std::string>> take_string_list(
      const std::string& key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    if (v->is_string()) return std::vector<std::string>{v->get<std::string>()};
    if (!v->is_array()) {
      add(key, "expected a path or an array of paths");
      return std::nullopt;
    }
    std::vector<std::string> out;
    for (const json& e : *v) {
      if (!e.is_string()) {
        add(key, "expected a path or an array of paths");
        return std::nullopt;
      }
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  // Every key never consumed is either a typo or not used by this kind.
  void flag_leftovers(ExperimentKind kind) {
    for (const auto& [key, value] : raw_)
      add(key, std::string("unrecognized or not used by kind '") +
                   varqc::to_string(kind) + "'");
  }

 private:
  std::map<std::string, json> raw_;
  std::vector<Diagnostic> diags_;
};

struct Plan {
  ExperimentKind kind = ExperimentKind::Vqe;
  std::uint64_t seed = 0;
  std::string out_dir;
  int threads = 1;

  // Optimization kinds.
  PauliSum h_p;
  std::string initial_state;
  std::unique_ptr<ParametrizedState> ansatz;
  std::optional<HybridAnsatz> hybrid;
  OptimizerConfig optimizer;
  std::optional<SampledMode> sampling;

  // Digitization study.
  ControlSystem dig_sys;
  PulseSchedule dig_sched;
  std::vector<int> r_values;

  // Controllability.
  PauliSum drift;
  std::vector<PauliSum> controls;
  LieClosureCaps caps;

  // Landscape scan.
  std::vector<int> scan_ns;
  int scan_samples = 0;
  int scan_layers = 1;
  double scan_fd_step = 1e-5;
  std::optional<PauliSum> scan_problem;
};

std::optional<ExperimentKind> kind_from_token(const std::string& token) {
  for (ExperimentKind k :
       {ExperimentKind::Vqe, ExperimentKind::Qaoa, ExperimentKind::Pulse,
        ExperimentKind::Hybrid, ExperimentKind::DigitizeStudy,
        ExperimentKind::Controllability, ExperimentKind::LandscapeScan})
    if (token == varqc::to_string(k)) return k;
  return std::nullopt;
}

std::optional<std::string> read_file(const fs::path& path, const std::string& field,
                                     Reader& r) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    r.add(field, "cannot open file '" + path.string() + "'");
    return std::nullopt;
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::optional<PauliSum> load_pauli(const fs::path& path,
                                   const std::string& field, Reader& r) {
  auto text = read_file(path, field, r);
  if (!text) return std::nullopt;
  try {
    return parse_pauli_sum(*text);
  } catch (const ParseError& e) {
    r.add(field, "'" + path.string() + "': " + e.what());
  } catch (const std::exception& e) {
    r.add(field, "'" + path.string() + "': " + e.what());
  }
  return std::nullopt;
}

std::optional<Circuit> load_circuit(const fs::path& path,
                                    const std::string& field, Reader& r) {
  auto text = read_file(path, field, r);
  if (!text) return std::nullopt;
  try {
    return circuit_from_json(json::parse(*text));
  } catch (const json::parse_error& e) {
    const auto [line, col] = locate(*text, e.byte > 0 ? e.byte - 1 : 0);
    r.add(field, "'" + path.string() + "' line " + std::to_string(line) +
                     ", col " + std::to_string(col) + ": " + e.what());
  } catch (const std::exception& e) {
    r.add(field, "'" + path.string() + "': " + e.what());
  }
  return std::nullopt;
}

std::optional<ControlSystem> load_system(const fs::path& path,
                                         const std::string& field, Reader& r) {
  auto text = read_file(path, field, r);
  if (!text) return std::nullopt;
  try {
    return system_from_json(json::parse(*text));
  } catch (const json::parse_error& e) {
    const auto [line, col] = locate(*text, e.byte > 0 ? e.byte - 1 : 0);
    r.add(field, "'" + path.string() + "' line " + std::to_string(line) +
                     ", col " + std::to_string(col) + ": " + e.what());
  } catch (const std::exception& e) {
    r.add(field, "'" + path.string() + "': " + e.what());
  }
  return std::nullopt;
}

std::optional<PulseSchedule> load_schedule(const fs::path& path,
                                           const std::string& field,
                                           Reader& r) {
  auto text = read_file(path, field, r);
  if (!text) return std::nullopt;
  try {
    return parse_schedule_csv(*text);
  } catch (const std::exception& e) {
    r.add(field, "'" + path.string() + "': " + e.what());
  }
  return std::nullopt;
}

PauliSum transverse_field(int n) {
  std::vector<PauliTerm> terms;
  for (int q = 0; q < n; ++q) {
    PauliString s = PauliString::identity(n);
    s.axes[static_cast<std::size_t>(q)] = Axis::X;
    terms.push_back({1.0, std::move(s)});
  }
  return PauliSum(n, std::move(terms));
}

void read_optimizer(Reader& r, OptimizerConfig& cfg) {
  if (auto m = r.take_string("optimizer.method")) {
    if (*m == "gradient-descent")
      cfg.method = OptimizerMethod::GradientDescent;
    else if (*m == "nelder-mead")
      cfg.method = OptimizerMethod::NelderMead;
    else
      r.add("optimizer.method",
            "expected 'gradient-descent' or 'nelder-mead', got '" + *m + "'");
  }
  if (auto v = r.take_int("optimizer.max_iterations")) {
    if (*v < 0)
      r.add("optimizer.max_iterations", "must be nonnegative");
    else
      cfg.max_iterations = static_cast<int>(*v);
  }
  if (auto v = r.take_number("optimizer.initial_step")) {
    if (!(*v > 0))
      r.add("optimizer.initial_step", "must be positive");
    else
      cfg.initial_step = *v;
  }
  if (auto v = r.take_number("optimizer.grad_tol")) {
    if (!(*v > 0))
      r.add("optimizer.grad_tol", "must be positive");
    else
      cfg.grad_tol = *v;
  }
  if (auto v = r.take_number("optimizer.j_tol")) {
    if (!(*v > 0))
      r.add("optimizer.j_tol", "must be positive");
    else
      cfg.j_tol = *v;
  }
  if (auto v = r.take_int("optimizer.stall_window")) {
    if (*v < 1)
      r.add("optimizer.stall_window", "must be at least 1");
    else
      cfg.stall_window = static_cast<int>(*v);
  }
  if (auto v = r.take_number("optimizer.fd_step")) {
    if (!(*v > 0))
      r.add("optimizer.fd_step", "must be positive");
    else
      cfg.fd_step = *v;
  }
  if (auto v = r.take_int("optimizer.restarts")) {
    if (*v < 0)
      r.add("optimizer.restarts", "must be nonnegative");
    else
      cfg.restarts = static_cast<int>(*v);
  }
  if (auto v = r.take_number("optimizer.amplitude_bound")) {
    if (!(*v > 0))
      r.add("optimizer.amplitude_bound", "must be positive");
    else
      cfg.amplitude_bound = *v;
  }
  if (auto v = r.take_number_list("optimizer.initial_params"))
    cfg.initial_params = std::move(*v);
}

void read_sampling(Reader& r, std::optional<SampledMode>& sampling,
                   std::uint64_t seed) {
  const auto eps = r.take_number("sampling.epsilon");
  const auto shots = r.take_int("sampling.shots_per_term");
  const auto alloc = r.take_string("sampling.allocation");
  if (!eps && !shots && !alloc) return;

  SampledMode mode;
  mode.seed = seed;
  if (eps && shots) {
    r.add("sampling.epsilon",
          "give either a target precision or shots_per_term, not both");
    return;
  }
  if (eps) {
    if (!(*eps > 0)) {
      r.add("sampling.epsilon", "must be positive");
      return;
    }
    mode.epsilon = *eps;
  } else if (shots) {
    if (*shots < 1) {
      r.add("sampling.shots_per_term", "must be at least 1");
      return;
    }
    mode.shots_per_term = *shots;
  } else {
    r.add("sampling.epsilon",
          "sampled mode needs epsilon or shots_per_term");
    return;
  }
  if (alloc) {
    if (*alloc == "equal")
      mode.allocation = ShotAllocation::Equal;
    else if (*alloc == "weighted")
      mode.allocation = ShotAllocation::Weighted;
    else {
      r.add("sampling.allocation",
            "expected 'equal' or 'weighted', got '" + *alloc + "'");
      return;
    }
  }
  sampling = mode;
}

// Builds the full execution plan, collecting every violation. The plan is
// usable only when the diagnostic list comes back empty.
Plan build_plan(const std::string& config_path, const CliOverrides& overrides,
                std::vector<Diagnostic>& diags) {
  Reader r(parse_config_file(config_path));
  const fs::path base = fs::path(config_path).parent_path();
  auto resolve = [&](const std::string& p) { return base / p; };

  Plan plan;

  const auto kind_token = r.take_string("kind");
  std::optional<ExperimentKind> kind;
  if (!kind_token) {
    r.add("kind", "required field is missing");
  } else if (!(kind = kind_from_token(*kind_token))) {
    r.add("kind", "unknown experiment kind '" + *kind_token + "'");
  }

  if (auto v = r.take_int("seed")) {
    if (*v < 0)
      r.add("seed", "must be nonnegative");
    else
      plan.seed = static_cast<std::uint64_t>(*v);
  }
  if (overrides.seed) plan.seed = *overrides.seed;
  if (auto v = r.take_string("out")) plan.out_dir = *v;
  if (overrides.out_dir) plan.out_dir = *overrides.out_dir;
  if (auto v = r.take_int("threads")) {
    if (*v < 1)
      r.add("threads", "must be at least 1");
    else
      plan.threads = static_cast<int>(*v);
  }
  if (overrides.threads) plan.threads = std::max(1, *overrides.threads);

  if (!kind) {
    diags = std::move(r.diags());
    return plan;
  }
  plan.kind = *kind;

  const bool optimization =
      plan.kind == ExperimentKind::Vqe || plan.kind == ExperimentKind::Qaoa ||
      plan.kind == ExperimentKind::Pulse || plan.kind == ExperimentKind::Hybrid;

  if (optimization) {
    std::optional<PauliSum> h_p;
    if (auto p = r.take_string("problem.hamiltonian"))
      h_p = load_pauli(resolve(*p), "problem.hamiltonian", r);
    else
      r.add("problem.hamiltonian", "required field is missing");

    plan.initial_state =
        plan.kind == ExperimentKind::Qaoa ? "plus" : "zero";
    if (auto s = r.take_string("problem.initial_state")) {
      if (*s != "zero" && *s != "plus")
        r.add("problem.initial_state",
              "expected 'zero' or 'plus', got '" + *s + "'");
      else
        plan.initial_state = *s;
    }

    read_optimizer(r, plan.optimizer);
    plan.optimizer.seed = plan.seed;
    plan.optimizer.threads = plan.threads;
    read_sampling(r, plan.sampling, plan.seed);

    switch (plan.kind) {
      case ExperimentKind::Vqe: {
        const auto circuit_path = r.take_string("ansatz.circuit");
        const auto layers = r.take_int("ansatz.layers");
        if (!!circuit_path == layers.has_value()) {
          r.add("ansatz.circuit",
                "vqe needs exactly one of ansatz.circuit or ansatz.layers");
          break;
        }
        if (circuit_path) {
          if (auto c = load_circuit(resolve(*circuit_path), "ansatz.circuit", r)) {
            if (h_p && c->n != h_p->num_qubits())
              r.add("ansatz.circuit",
                    "circuit acts on " + std::to_string(c->n) +
                        " qubits but problem.hamiltonian has " +
                        std::to_string(h_p->num_qubits()));
            else
              plan.ansatz = std::make_unique<CircuitState>(std::move(*c));
          }
        } else if (h_p) {
          if (*layers < 1) {
            r.add("ansatz.layers", "must be at least 1");
          } else {
            const int n = h_p->num_qubits();
            const std::vector<double> zeros(
                static_cast<std::size_t>(n) * static_cast<std::size_t>(*layers),
                0.0);
            plan.ansatz = std::make_unique<CircuitState>(
                build_hardware_efficient(n, static_cast<int>(*layers), zeros));
          }
        }
        break;
      }
      case ExperimentKind::Qaoa: {
        const auto p_rounds = r.take_int("ansatz.p");
        std::optional<PauliSum> h_d;
        if (auto d = r.take_string("ansatz.driver"))
          h_d = load_pauli(resolve(*d), "ansatz.driver", r);
        if (!p_rounds) {
          r.add("ansatz.p", "required field is missing");
          break;
        }
        if (*p_rounds < 1) {
          r.add("ansatz.p", "must be at least 1");
          break;
        }
        if (!h_p) break;
        if (h_d && h_d->num_qubits() != h_p->num_qubits()) {
          r.add("ansatz.driver",
                "driver acts on " + std::to_string(h_d->num_qubits()) +
                    " qubits but problem.hamiltonian has " +
                    std::to_string(h_p->num_qubits()));
          break;
        }
        const PauliSum mixer =
            h_d ? std::move(*h_d) : transverse_field(h_p->num_qubits());
        const std::vector<double> zeros(static_cast<std::size_t>(*p_rounds),
                                        0.0);
        try {
          plan.ansatz = std::make_unique<CircuitState>(build_qaoa(
              *h_p, mixer, static_cast<int>(*p_rounds), zeros, zeros));
        } catch (const std::exception& e) {
          r.add("ansatz.p", e.what());
        }
        break;
      }
      case ExperimentKind::Pulse: {
        const auto system_path = r.take_string("ansatz.system");
        if (!system_path) {
          r.add("ansatz.system", "required field is missing");
          break;
        }
        if (auto sys = load_system(resolve(*system_path), "ansatz.system", r)) {
          if (h_p && sys->n != h_p->num_qubits())
            r.add("ansatz.system",
                  "system acts on " + std::to_string(sys->n) +
                      " qubits but problem.hamiltonian has " +
                      std::to_string(h_p->num_qubits()));
          else
            plan.ansatz = std::make_unique<PulseState>(std::move(*sys));
        }
        break;
      }
      case ExperimentKind::Hybrid: {
        const auto circuit_path = r.take_string("ansatz.circuit");
        const auto promote = r.take_int_list("ansatz.promote");
        if (!circuit_path) r.add("ansatz.circuit", "required field is missing");
        if (!promote) r.add("ansatz.promote", "required field is missing");
        if (!circuit_path || !promote) break;
        auto c = load_circuit(resolve(*circuit_path), "ansatz.circuit", r);
        if (!c) break;
        if (h_p && c->n != h_p->num_qubits()) {
          r.add("ansatz.circuit",
                "circuit acts on " + std::to_string(c->n) +
                    " qubits but problem.hamiltonian has " +
                    std::to_string(h_p->num_qubits()));
          break;
        }
        std::vector<int> sel;
        for (std::int64_t v : *promote) sel.push_back(static_cast<int>(v));
        try {
          HybridAnsatz h = hybridize(*c, sel);
          // The promoted circuit carries natural starting values; use them
          // unless the config pins its own.
          if (!plan.optimizer.initial_params) {
            try {
              plan.optimizer.initial_params = h.initial_params();
            } catch (const std::exception&) {
            }
          }
          plan.hybrid = h;
          plan.ansatz = std::make_unique<HybridState>(std::move(h));
        } catch (const std::exception& e) {
          r.add("ansatz.promote", e.what());
        }
        break;
      }
      default:
        break;
    }

    if (h_p) plan.h_p = std::move(*h_p);
    if (plan.ansatz) {
      if (plan.optimizer.initial_params &&
          plan.optimizer.initial_params->size() !=
              static_cast<std::size_t>(plan.ansatz->param_count()))
        r.add("optimizer.initial_params",
              "expected " + std::to_string(plan.ansatz->param_count()) +
                  " values, got " +
                  std::to_string(plan.optimizer.initial_params->size()));
      if (plan.ansatz->param_count() == 0 &&
          plan.optimizer.method == OptimizerMethod::NelderMead)
        r.add("optimizer.method",
              "the simplex needs at least one free parameter");
    }
  } else if (plan.kind == ExperimentKind::DigitizeStudy) {
    const auto gen_path = r.take_string("digitize.generator");
    const auto tau = r.take_number("digitize.tau");
    const auto sys_path = r.take_string("digitize.system");
    const auto sched_path = r.take_string("digitize.schedule");
    if (!!gen_path == !!sys_path) {
      r.add("digitize.generator",
            "give exactly one of digitize.generator or digitize.system");
    } else if (gen_path) {
      if (sched_path)
        r.add("digitize.schedule", "only valid together with digitize.system");
      if (auto gen = load_pauli(resolve(*gen_path), "digitize.generator", r)) {
        plan.dig_sys.n = gen->num_qubits();
        plan.dig_sys.h0 = std::move(*gen);
        plan.dig_sys.T = tau.value_or(1.0);
        plan.dig_sys.M = 1;
        plan.dig_sched.amplitudes.resize(1, 0);
        if (!(plan.dig_sys.T > 0)) r.add("digitize.tau", "must be positive");
      }
    } else {
      if (tau) r.add("digitize.tau", "only valid together with digitize.generator");
      if (!sched_path) {
        r.add("digitize.schedule", "required together with digitize.system");
      } else if (auto sys = load_system(resolve(*sys_path), "digitize.system", r)) {
        if (auto sched =
                load_schedule(resolve(*sched_path), "digitize.schedule", r)) {
          try {
            validate_schedule(*sys, *sched);
            plan.dig_sys = std::move(*sys);
            plan.dig_sched = std::move(*sched);
          } catch (const std::exception& e) {
            r.add("digitize.schedule", "'" + resolve(*sched_path).string() +
                                           "' does not fit '" +
                                           resolve(*sys_path).string() +
                                           "': " + e.what());
          }
        }
      }
    }
    if (auto rv = r.take_int_list("digitize.r_values")) {
      if (rv->empty()) r.add("digitize.r_values", "must be nonempty");
      for (std::int64_t v : *rv) {
        if (v < 1) {
          r.add("digitize.r_values", "every entry must be at least 1");
          break;
        }
        plan.r_values.push_back(static_cast<int>(v));
      }
    } else {
      r.add("digitize.r_values", "required field is missing");
    }
  } else if (plan.kind == ExperimentKind::Controllability) {
    std::optional<PauliSum> drift;
    if (auto p = r.take_string("controllability.drift"))
      drift = load_pauli(resolve(*p), "controllability.drift", r);
    else
      r.add("controllability.drift", "required field is missing");
    std::vector<PauliSum> controls;
    bool controls_ok = true;
    if (auto paths = r.take_string_list("controllability.controls")) {
      for (const std::string& p : *paths) {
        if (auto c = load_pauli(resolve(p), "controllability.controls", r))
          controls.push_back(std::move(*c));
        else
          controls_ok = false;
      }
    }
    if (auto v = r.take_int("controllability.n_cap")) {
      if (*v < 1)
        r.add("controllability.n_cap", "must be at least 1");
      else
        plan.caps.n_cap = static_cast<int>(*v);
    }
    if (auto v = r.take_int("controllability.max_rounds")) {
      if (*v < 1)
        r.add("controllability.max_rounds", "must be at least 1");
      else
        plan.caps.max_rounds = static_cast<int>(*v);
    }
    if (auto v = r.take_int("controllability.max_elements")) {
      if (*v < 0)
        r.add("controllability.max_elements", "must be nonnegative");
      else
        plan.caps.max_elements = static_cast<int>(*v);
    }
    if (drift && controls_ok) {
      const int n = drift->num_qubits();
      for (std::size_t k = 0; k < controls.size(); ++k)
        if (controls[k].num_qubits() != n)
          r.add("controllability.controls",
                "control " + std::to_string(k) + " acts on " +
                    std::to_string(controls[k].num_qubits()) +
                    " qubits but the drift has " + std::to_string(n));
      if (n > plan.caps.n_cap)
        r.add("controllability.drift",
              "system size " + std::to_string(n) +
                  " exceeds the closure cap n_cap = " +
                  std::to_string(plan.caps.n_cap));
      plan.drift = std::move(*drift);
      plan.controls = std::move(controls);
    }
  } else if (plan.kind == ExperimentKind::LandscapeScan) {
    if (auto ns = r.take_int_list("scan.ns")) {
      if (ns->empty()) r.add("scan.ns", "must be nonempty");
      for (std::int64_t v : *ns) {
        if (v < 1) {
          r.add("scan.ns", "every entry must be at least 1");
          break;
        }
        plan.scan_ns.push_back(static_cast<int>(v));
      }
    } else {
      r.add("scan.ns", "required field is missing");
    }
    if (auto v = r.take_int("scan.samples")) {
      if (*v < 30)
        r.add("scan.samples", "need at least 30 samples per point");
      else
        plan.scan_samples = static_cast<int>(*v);
    } else {
      r.add("scan.samples", "required field is missing");
    }
    if (auto v = r.take_int("scan.layers")) {
      if (*v < 1)
        r.add("scan.layers", "must be at least 1");
      else
        plan.scan_layers = static_cast<int>(*v);
    }
    if (auto v = r.take_number("scan.fd_step")) {
      if (!(*v > 0))
        r.add("scan.fd_step", "must be positive");
      else
        plan.scan_fd_step = *v;
    }
    if (auto p = r.take_string("scan.hamiltonian")) {
      if (auto h = load_pauli(resolve(*p), "scan.hamiltonian", r)) {
        for (int n : plan.scan_ns)
          if (n != h->num_qubits())
            r.add("scan.hamiltonian",
                  "fixed observable has " + std::to_string(h->num_qubits()) +
                      " qubits but scan.ns asks for " + std::to_string(n));
        plan.scan_problem = std::move(*h);
      }
    }
  }

  r.flag_leftovers(plan.kind);
  diags = std::move(r.diags());
  return plan;
}

// ---------------------------------------------------------------------
// Execution and artifact rendering
// ---------------------------------------------------------------------

struct Artifact {
  std::string name;
  std::string content;
};

struct Outcome {
  std::vector<Artifact> artifacts;
  ojson report;       // printed for directory-less runs, mirrored in files
  std::string status_line;
  int exit_code = 0;
};

double operator_norm(const Eigen::MatrixXcd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
}

// Deterministic ordered parallel map over [0, count).
void parallel_for(int count, int threads,
                  const std::function<void(int)>& body) {
  const int workers = std::clamp(threads, 1, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1))
          body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

ojson params_json(const std::vector<double>& v) {
  ojson arr = ojson::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

Outcome run_optimization(const Plan& plan) {
  const int n = plan.h_p.num_qubits();
  const StateVector psi0 =
      plan.initial_state == "plus" ? plus_state(n) : zero_state(n);
  const ObjectiveSpec spec{plan.h_p, psi0, plan.sampling};
  const OptimizationTrace trace = optimize(spec, *plan.ansatz, plan.optimizer);

  std::string jsonl;
  std::string csv = "iter,J,grad_norm,shots\n";
  for (const IterationRecord& rec : trace.iterations) {
    ojson line{{"iter", rec.iter},
               {"params", params_json(rec.params)},
               {"J", rec.j},
               {"grad_norm", rec.grad_norm},
               {"shots", rec.shots}};
    jsonl += line.dump();
    jsonl += '\n';
    csv += std::to_string(rec.iter) + ',' + format_double(rec.j) + ',' +
           format_double(rec.grad_norm) + ',' + std::to_string(rec.shots) +
           '\n';
  }
  ojson final_line{{"status", varqc::to_string(trace.status)},
                   {"best_params", params_json(trace.best_params)},
                   {"best_j", trace.best_j},
                   {"total_shots", trace.total_shots},
                   {"restart_index", trace.restart_index}};
  jsonl += final_line.dump();
  jsonl += '\n';

  ojson summary{
      {"kind", varqc::to_string(plan.kind)},
      {"seed", plan.seed},
      {"n", n},
      {"method", plan.optimizer.method == OptimizerMethod::GradientDescent
                     ? "gradient-descent"
                     : "nelder-mead"},
      {"mode", plan.sampling ? "sampled" : "exact"},
      {"status", varqc::to_string(trace.status)},
      {"restart_index", trace.restart_index},
      {"iterations", trace.iterations.size()},
      {"best_j", trace.best_j},
      {"best_params", params_json(trace.best_params)},
      {"total_shots", trace.total_shots}};
  if (!trace.best_params.empty() || plan.ansatz->param_count() == 0)
    summary["final_state"] =
        state_to_json(plan.ansatz->evaluate(psi0, trace.best_params));

  Outcome out;
  out.artifacts.push_back({"trace.jsonl", std::move(jsonl)});
  out.artifacts.push_back({"trace.csv", std::move(csv)});
  if (plan.hybrid)
    out.artifacts.push_back(
        {"ansatz.json", hybrid_to_json(*plan.hybrid).dump(2) + "\n"});
  out.report = std::move(summary);
  out.status_line =
      std::string("status: ") + varqc::to_string(trace.status) + ", best J = " +
      format_double(trace.best_j) + " after " +
      std::to_string(trace.iterations.size()) + " iterations";
  out.exit_code = trace.status == TerminalStatus::Stalled ? 1 : 0;
  return out;
}

Outcome run_controllability(const Plan& plan) {
  const LieAlgebraReport rep =
      dynamical_lie_algebra(plan.drift, plan.controls, plan.caps);
  ojson summary{{"kind", varqc::to_string(plan.kind)},
                {"n", rep.n},
                {"dimension", rep.dimension},
                {"full_dimension", rep.full_dimension},
                {"controllable", rep.controllable},
                {"generations", rep.generations},
                {"truncated", rep.truncated}};
  Outcome out;
  out.report = std::move(summary);
  out.status_line = std::string("dimension ") + std::to_string(rep.dimension) +
                    " of " + std::to_string(rep.full_dimension) +
                    (rep.controllable ? ", controllable" : ", not controllable");
  return out;
}

Outcome run_digitize(const Plan& plan) {
  const Eigen::MatrixXcd exact =
      propagator_piecewise(plan.dig_sys, plan.dig_sched).matrix;
  std::vector<double> errors(plan.r_values.size());
  parallel_for(static_cast<int>(plan.r_values.size()), plan.threads, [&](int i) {
    const Circuit c =
        digitize(plan.dig_sys, plan.dig_sched, plan.r_values[static_cast<std::size_t>(i)]);
    errors[static_cast<std::size_t>(i)] =
        operator_norm(circuit_unitary(c) - exact);
  });

  std::string csv = "r,operator_norm_error\n";
  ojson rs = ojson::array();
  ojson errs = ojson::array();
  for (std::size_t i = 0; i < plan.r_values.size(); ++i) {
    csv += std::to_string(plan.r_values[i]) + ',' + format_double(errors[i]) +
           '\n';
    rs.push_back(plan.r_values[i]);
    errs.push_back(errors[i]);
  }
  ojson summary{{"kind", varqc::to_string(plan.kind)},
                {"n", plan.dig_sys.n},
                {"slices", plan.dig_sched.slices()},
                {"r_values", std::move(rs)},
                {"errors", std::move(errs)}};
  Outcome out;
  out.artifacts.push_back({"error_vs_r.csv", std::move(csv)});
  out.report = std::move(summary);
  out.status_line =
      "digitized " + std::to_string(plan.r_values.size()) + " settings";
  return out;
}

Outcome run_scan(const Plan& plan) {
  const int layers = plan.scan_layers;
  auto builder = [layers](int n) {
    const std::vector<double> zeros(
        static_cast<std::size_t>(n) * static_cast<std::size_t>(layers), 0.0);
    return build_hardware_efficient(n, layers, zeros);
  };
  auto problem = [&plan](int n) {
    if (plan.scan_problem) return *plan.scan_problem;
    PauliString s = PauliString::identity(n);
    s.axes[0] = Axis::Z;
    return PauliSum::single(1.0, s);
  };
  const VarianceScanResult res =
      gradient_variance_scan(builder, problem, plan.scan_ns, plan.scan_samples,
                             plan.seed, plan.scan_fd_step);

  std::string samples_csv = "n,sample,grad_component,objective,grad_norm\n";
  for (const VarianceSample& s : res.samples)
    samples_csv += std::to_string(s.n) + ',' + std::to_string(s.sample) + ',' +
                   format_double(s.grad_component) + ',' +
                   format_double(s.objective) + ',' +
                   format_double(s.grad_norm) + '\n';
  std::string var_csv = "n,variance\n";
  ojson ns = ojson::array();
  ojson vars = ojson::array();
  for (const VariancePoint& p : res.per_n) {
    var_csv += std::to_string(p.n) + ',' + format_double(p.variance) + '\n';
    ns.push_back(p.n);
    vars.push_back(p.variance);
  }
  ojson summary{{"kind", varqc::to_string(plan.kind)},
                {"seed", plan.seed},
                {"layers", layers},
                {"samples", plan.scan_samples},
                {"ns", std::move(ns)},
                {"variances", std::move(vars)}};
  Outcome out;
  out.artifacts.push_back({"samples.csv", std::move(samples_csv)});
  out.artifacts.push_back({"variance.csv", std::move(var_csv)});
  out.report = std::move(summary);
  out.status_line = "scanned " + std::to_string(plan.scan_ns.size()) +
                    " register sizes, " + std::to_string(plan.scan_samples) +
                    " samples each";
  return out;
}

void write_artifacts(const Plan& plan, Outcome& outcome) {
  const fs::path dir(plan.out_dir);
  fs::create_directories(dir);
  outcome.artifacts.push_back({"summary.json", outcome.report.dump(2) + "\n"});
  for (const Artifact& a : outcome.artifacts) {
    std::ofstream f(dir / a.name, std::ios::binary);
    if (!f)
      throw std::runtime_error("cannot write artifact '" +
                               (dir / a.name).string() + "'");
    f << a.content;
    if (!f) throw std::runtime_error("short write on '" + a.name + "'");
  }
}

}  // namespace

std::vector<Diagnostic> validate_experiment(const std::string& config_path,
                                            const CliOverrides& overrides) {
  std::vector<Diagnostic> diags;
  build_plan(config_path, overrides, diags);
  return diags;
}

int run_experiment(const std::string& config_path,
                   const CliOverrides& overrides, std::ostream& out,
                   std::ostream& err,
                   std::optional<ExperimentKind> required_kind,
                   bool require_out_dir) {
  Plan plan;
  try {
    std::vector<Diagnostic> diags;
    plan = build_plan(config_path, overrides, diags);
    if (required_kind && diags.empty() && plan.kind != *required_kind) {
      diags.push_back({"kind",
                       std::string("this subcommand runs only '") +
                           to_string(*required_kind) + "' configs"});
    }
    if (require_out_dir && plan.out_dir.empty())
      diags.push_back(
          {"out", "an output directory is required (config `out` or --out)"});
    if (!diags.empty()) {
      for (const Diagnostic& d : diags) err << to_string(d) << '\n';
      return 2;
    }
  } catch (const ParseError& e) {
    err << config_path << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return 2;
  }

  Outcome outcome;
  try {
    switch (plan.kind) {
      case ExperimentKind::Vqe:
      case ExperimentKind::Qaoa:
      case ExperimentKind::Pulse:
      case ExperimentKind::Hybrid:
        outcome = run_optimization(plan);
        break;
      case ExperimentKind::DigitizeStudy:
        outcome = run_digitize(plan);
        break;
      case ExperimentKind::Controllability:
        outcome = run_controllability(plan);
        break;
      case ExperimentKind::LandscapeScan:
        outcome = run_scan(plan);
        break;
    }
  } catch (const ResourceLimitError& e) {
    err << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return 1;
  }

  try {
    if (!plan.out_dir.empty()) {
      write_artifacts(plan, outcome);
      out << outcome.status_line << "; artifacts in " << plan.out_dir << '\n';
    } else {
      out << outcome.report.dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return 1;
  }
  return outcome.exit_code;
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"variational quantum optimization workbench"};
  app.require_subcommand(1);

  struct SubState {
    CLI::App* cmd = nullptr;
    std::string config;
    std::uint64_t seed = 0;
    std::string out_dir;
    int threads = 1;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* out_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
    std::optional<ExperimentKind> kind;
    bool validate_only = false;
    bool needs_out = false;
  };

  std::vector<std::unique_ptr<SubState>> subs;
  auto add_sub = [&](const char* name, const char* desc,
                     std::optional<ExperimentKind> kind, bool validate_only,
                     bool needs_out) {
    auto s = std::make_unique<SubState>();
    s->cmd = app.add_subcommand(name, desc);
    s->cmd->add_option("--config", s->config, "experiment config file")
        ->required();
    s->seed_opt = s->cmd->add_option("--seed", s->seed, "override the seed");
    s->out_opt =
        s->cmd->add_option("--out", s->out_dir, "artifact output directory");
    s->threads_opt =
        s->cmd->add_option("--threads", s->threads, "worker thread cap");
    s->kind = kind;
    s->validate_only = validate_only;
    s->needs_out = needs_out;
    subs.push_back(std::move(s));
  };

  add_sub("run", "run the configured experiment", std::nullopt, false, true);
  add_sub("validate", "check a config without executing", std::nullopt, true,
          false);
  add_sub("check-controllability", "dynamical Lie algebra closure report",
          ExperimentKind::Controllability, false, false);
  add_sub("scan-landscape", "gradient variance scan over register sizes",
          ExperimentKind::LandscapeScan, false, false);
  add_sub("digitize", "product-formula digitization error study",
          ExperimentKind::DigitizeStudy, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const SubState* active = nullptr;
  for (const auto& s : subs)
    if (s->cmd->parsed()) active = s.get();
  if (!active) {
    err << "no subcommand selected\n";
    return 2;
  }

  CliOverrides overrides;
  if (active->seed_opt->count() > 0) overrides.seed = active->seed;
  if (active->out_opt->count() > 0) overrides.out_dir = active->out_dir;
  if (active->threads_opt->count() > 0) overrides.threads = active->threads;

  if (active->validate_only) {
    try {
      const std::vector<Diagnostic> diags =
          validate_experiment(active->config, overrides);
      for (const Diagnostic& d : diags) err << to_string(d) << '\n';
      if (diags.empty()) out << "ok\n";
      return diags.empty() ? 0 : 2;
    } catch (const ParseError& e) {
      err << active->config << ": " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      err << e.what() << '\n';
      return 2;
    }
  }
  return run_experiment(active->config, overrides, out, err, active->kind,
                        active->needs_out);
}

}  // namespace varqc
