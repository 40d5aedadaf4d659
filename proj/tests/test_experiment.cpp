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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "varqc/circuit.hpp"
#include "varqc/errors.hpp"
#include "varqc/level_maps.hpp"
#include "varqc/pauli.hpp"
#include "varqc/pulse.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using varqc::CliOverrides;
using varqc::Diagnostic;
using varqc::ExperimentKind;
using varqc::ParseError;

namespace {

// Self-cleaning scratch directory under the system temp root.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("varqc_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path file(const std::string& name) const { return path / name; }
};

void write_text(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  REQUIRE(f.good());
  f << content;
}

std::string read_text(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run(const std::string& config, const CliOverrides& overrides,
        std::string* out_text = nullptr, std::string* err_text = nullptr,
        std::optional<ExperimentKind> required = {},
        bool require_out = true) {
  std::ostringstream out;
  std::ostringstream err;
  const int code =
      varqc::run_experiment(config, overrides, out, err, required, require_out);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::vector<const char*> argv;
  argv.push_back("varqc");
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = varqc::run_cli(static_cast<int>(argv.size()), argv.data(),
                                  out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

const char* kRing3 = "1.0 ZZI\n1.0 IZZ\n1.0 ZIZ\n";

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("config text parses sections, JSON values, and bare strings") {
  const std::string text =
      "kind = qaoa\n"
      "seed = 12  # trailing comment\n"
      "\n"
      "[problem]\n"
      "hamiltonian = ham.txt\n"
      "label = \"a # not a comment\"  # real comment\n"
      "\n"
      "[optimizer]\n"
      "initial_params = [0.5, -0.25]\n"
      "grad_tol = 1e-6\n"
      "method = nelder-mead\n";
  const auto kv = varqc::parse_config_text(text);
  CHECK(kv.at("kind") == json("qaoa"));
  CHECK(kv.at("seed") == json(12));
  CHECK(kv.at("problem.hamiltonian") == json("ham.txt"));
  CHECK(kv.at("problem.label") == json("a # not a comment"));
  CHECK(kv.at("optimizer.initial_params") == json({0.5, -0.25}));
  CHECK(kv.at("optimizer.grad_tol") == json(1e-6));
  CHECK(kv.at("optimizer.method") == json("nelder-mead"));
  CHECK(kv.size() == 7);
}

TEST_CASE("config text reports 1-based positions for syntax errors") {
  try {
    varqc::parse_config_text("kind = vqe\nkind = qaoa\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  try {
    varqc::parse_config_text("ok = 1\nbroken = [1, 2\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.col() >= 10);
  }
  CHECK_THROWS_AS(varqc::parse_config_text("no equals sign\n"), ParseError);
  CHECK_THROWS_AS(varqc::parse_config_text("[unterminated\n"), ParseError);
  CHECK_THROWS_AS(varqc::parse_config_text("x =\n"), ParseError);
  CHECK_THROWS_AS(varqc::parse_config_text("bad key = 1\n"), ParseError);
  CHECK_THROWS_AS(varqc::parse_config_text("[bad name]\n"), ParseError);
}

TEST_CASE("a JSON object config flattens one level of sections") {
  const std::string text =
      R"({"kind": "qaoa", "seed": 3,
          "problem": {"hamiltonian": "h.txt"},
          "ansatz": {"p": 2}})";
  const auto kv = varqc::parse_config_text(text);
  CHECK(kv.at("kind") == json("qaoa"));
  CHECK(kv.at("seed") == json(3));
  CHECK(kv.at("problem.hamiltonian") == json("h.txt"));
  CHECK(kv.at("ansatz.p") == json(2));

  try {
    varqc::parse_config_text("{\"kind\": }");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.col() >= 10);
  }
}

TEST_CASE("validation accepts a complete config and pins every violation") {
  TempDir dir("validate");
  write_text(dir.file("ring.txt"), kRing3);
  const std::string good =
      "kind = qaoa\nseed = 7\n[problem]\nhamiltonian = ring.txt\n"
      "[ansatz]\np = 1\n";
  write_text(dir.file("good.cfg"), good);
  CHECK(varqc::validate_experiment(dir.file("good.cfg").string(), {}).empty());

  SUBCASE("a zero sampling precision names the offending field") {
    write_text(dir.file("eps.cfg"), good + "[sampling]\nepsilon = 0\n");
    const auto diags =
        varqc::validate_experiment(dir.file("eps.cfg").string(), {});
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].field == "sampling.epsilon");
  }

  SUBCASE("unknown keys are flagged with their flattened name") {
    write_text(dir.file("unk.cfg"), good + "[optimizer]\nbogus = 1\n");
    const auto diags =
        varqc::validate_experiment(dir.file("unk.cfg").string(), {});
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].field == "optimizer.bogus");
  }

  SUBCASE("a missing referenced file becomes a diagnostic, not a throw") {
    write_text(dir.file("missing.cfg"),
               "kind = qaoa\n[problem]\nhamiltonian = nowhere.txt\n"
               "[ansatz]\np = 1\n");
    const auto diags =
        varqc::validate_experiment(dir.file("missing.cfg").string(), {});
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].field == "problem.hamiltonian");
    CHECK(diags[0].message.find("nowhere.txt") != std::string::npos);
  }

  SUBCASE("every violation is collected in one pass") {
    write_text(dir.file("multi.cfg"),
               "kind = qaoa\nthreads = 0\n[problem]\nhamiltonian = ring.txt\n"
               "initial_state = maybe\n[ansatz]\np = 0\n"
               "[sampling]\nepsilon = 0.1\nshots_per_term = 5\n");
    const auto diags =
        varqc::validate_experiment(dir.file("multi.cfg").string(), {});
    CHECK(diags.size() == 4);
  }

  SUBCASE("initial parameters must match the ansatz") {
    write_text(dir.file("len.cfg"),
               good + "[optimizer]\ninitial_params = [0.1, 0.2, 0.3]\n");
    const auto diags =
        varqc::validate_experiment(dir.file("len.cfg").string(), {});
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].field == "optimizer.initial_params");
    CHECK(diags[0].message.find('2') != std::string::npos);
  }
}

TEST_CASE("a schedule that does not fit its system cites both files") {
  TempDir dir("mismatch");
  varqc::ControlSystem sys;
  sys.n = 1;
  sys.h0 = varqc::PauliSum::single(1.0, varqc::PauliString::parse("Z"));
  sys.controls = {varqc::PauliSum::single(1.0, varqc::PauliString::parse("X"))};
  sys.T = 1.0;
  sys.M = 4;
  write_text(dir.file("sys.json"), varqc::system_to_json(sys).dump());
  write_text(dir.file("sched.csv"), "slice,k0\n1,0.5\n2,0.25\n");
  write_text(dir.file("dig.cfg"),
             "kind = digitize-study\n[digitize]\nsystem = sys.json\n"
             "schedule = sched.csv\nr_values = [1, 2]\n");
  const auto diags =
      varqc::validate_experiment(dir.file("dig.cfg").string(), {});
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].message.find("sys.json") != std::string::npos);
  CHECK(diags[0].message.find("sched.csv") != std::string::npos);
}

TEST_CASE("runs are reproducible byte for byte") {
  TempDir dir("rerun");
  write_text(dir.file("ring.txt"), kRing3);
  write_text(dir.file("qaoa.cfg"),
             "kind = qaoa\nseed = 7\n[problem]\nhamiltonian = ring.txt\n"
             "[ansatz]\np = 1\n[optimizer]\nmax_iterations = 60\n");
  CliOverrides a;
  a.out_dir = dir.file("a").string();
  REQUIRE(run(dir.file("qaoa.cfg").string(), a) == 0);
  CliOverrides b;
  b.out_dir = dir.file("b").string();
  REQUIRE(run(dir.file("qaoa.cfg").string(), b) == 0);

  for (const char* name : {"trace.jsonl", "trace.csv", "summary.json"}) {
    CAPTURE(name);
    CHECK(read_text(dir.file("a") / name) == read_text(dir.file("b") / name));
  }

  // The trace is one JSON record per iteration plus a terminal summary,
  // and the CSV mirrors the iteration count.
  const std::string jsonl = read_text(dir.file("a") / "trace.jsonl");
  std::istringstream lines(jsonl);
  std::string line;
  int records = 0;
  json last;
  while (std::getline(lines, line)) {
    last = json::parse(line);
    ++records;
  }
  CHECK(last.contains("status"));
  CHECK(last.contains("best_params"));
  const json summary = json::parse(read_text(dir.file("a") / "summary.json"));
  CHECK(summary.at("iterations") == records - 1);
  CHECK(summary.at("seed") == 7);
  CHECK(summary.at("mode") == "exact");
  CHECK(summary.at("status") == "converged");
  CHECK(summary.at("n") == 3);

  // A different seed changes the drawn start and therefore the trace.
  CliOverrides c;
  c.out_dir = dir.file("c").string();
  c.seed = 8;
  REQUIRE(run(dir.file("qaoa.cfg").string(), c) == 0);
  CHECK(read_text(dir.file("a") / "trace.jsonl") !=
        read_text(dir.file("c") / "trace.jsonl"));
  CHECK(json::parse(read_text(dir.file("c") / "summary.json")).at("seed") == 8);
}

TEST_CASE("controllability runs report the closure with or without files") {
  TempDir dir("ctrl");
  write_text(dir.file("drift.txt"), "1.0 Z\n");
  write_text(dir.file("ctrl.txt"), "1.0 X\n");
  write_text(dir.file("ctl.cfg"),
             "kind = controllability\n[controllability]\ndrift = drift.txt\n"
             "controls = ctrl.txt\n");

  std::string out;
  REQUIRE(run(dir.file("ctl.cfg").string(), {}, &out, nullptr,
              ExperimentKind::Controllability, false) == 0);
  const json report = json::parse(out);
  CHECK(report.at("dimension") == 3);
  CHECK(report.at("full_dimension") == 3);
  CHECK(report.at("controllable") == true);
  CHECK(report.at("truncated") == false);

  CliOverrides with_dir;
  with_dir.out_dir = dir.file("art").string();
  REQUIRE(run(dir.file("ctl.cfg").string(), with_dir) == 0);
  const json summary =
      json::parse(read_text(dir.file("art") / "summary.json"));
  CHECK(summary.at("dimension") == 3);
  CHECK(summary.at("controllable") == true);
}

TEST_CASE("invalid inputs exit 2 and leave no partial artifacts") {
  TempDir dir("exit2");
  write_text(dir.file("bad.txt"), "1.0 ZQ\n");
  write_text(dir.file("bad.cfg"),
             "kind = qaoa\n[problem]\nhamiltonian = bad.txt\n"
             "[ansatz]\np = 1\n");
  CliOverrides o;
  o.out_dir = dir.file("art").string();
  std::string err;
  CHECK(run(dir.file("bad.cfg").string(), o, nullptr, &err) == 2);
  CHECK(err.find("bad.txt") != std::string::npos);
  CHECK(!fs::exists(dir.file("art")));
}

TEST_CASE("the dense cap aborts execution with exit 3 before any write") {
  TempDir dir("exit3");
  write_text(dir.file("gen.txt"), "1.0 ZZZ\n");
  write_text(dir.file("dig.cfg"),
             "kind = digitize-study\n[digitize]\ngenerator = gen.txt\n"
             "r_values = [2]\n");
  CliOverrides o;
  o.out_dir = dir.file("art").string();

  const int saved = varqc::dense_qubit_cap();
  varqc::set_dense_qubit_cap(2);
  std::string err;
  const int code = run(dir.file("dig.cfg").string(), o, nullptr, &err);
  varqc::set_dense_qubit_cap(saved);

  CHECK(code == 3);
  CHECK(err.find("cap") != std::string::npos);
  CHECK(!fs::exists(dir.file("art")));
}

TEST_CASE("an unwritable artifact directory is a runtime failure") {
  TempDir dir("exit1");
  write_text(dir.file("ring.txt"), kRing3);
  write_text(dir.file("blocker"), "plain file\n");
  write_text(dir.file("qaoa.cfg"),
             "kind = qaoa\n[problem]\nhamiltonian = ring.txt\n"
             "[ansatz]\np = 1\n[optimizer]\nmax_iterations = 1\n");
  CliOverrides o;
  o.out_dir = (dir.file("blocker") / "nested").string();
  std::string err;
  CHECK(run(dir.file("qaoa.cfg").string(), o, nullptr, &err) == 1);
  CHECK(!err.empty());
}

TEST_CASE("digitize and scan runs write their tables") {
  TempDir dir("tables");
  write_text(dir.file("xz.txt"), "0.5 X\n0.5 Z\n");
  write_text(dir.file("dig.json"),
             R"({"kind": "digitize-study",
                 "digitize": {"generator": "xz.txt", "tau": 1.0,
                              "r_values": [4, 8, 16]}})");
  CliOverrides o;
  o.out_dir = dir.file("dig_art").string();
  REQUIRE(run(dir.file("dig.json").string(), o) == 0);
  const std::string csv = read_text(dir.file("dig_art") / "error_vs_r.csv");
  CHECK(csv.rfind("r,operator_norm_error\n", 0) == 0);
  const json summary =
      json::parse(read_text(dir.file("dig_art") / "summary.json"));
  REQUIRE(summary.at("errors").size() == 3);
  // First-order product formulas lose error linearly in r.
  const double e4 = summary.at("errors")[0].get<double>();
  const double e16 = summary.at("errors")[2].get<double>();
  CHECK(e16 < e4);

  write_text(dir.file("scan.cfg"),
             "kind = landscape-scan\nseed = 4\n[scan]\nns = [2]\n"
             "samples = 30\n");
  CliOverrides s;
  s.out_dir = dir.file("scan_art").string();
  REQUIRE(run(dir.file("scan.cfg").string(), s) == 0);
  CHECK(read_text(dir.file("scan_art") / "samples.csv")
            .rfind("n,sample,grad_component,objective,grad_norm\n", 0) == 0);
  const std::string var = read_text(dir.file("scan_art") / "variance.csv");
  CHECK(var.rfind("n,variance\n", 0) == 0);
  CHECK(std::count(var.begin(), var.end(), '\n') == 2);
}

TEST_CASE("hybrid runs serialize the promoted ansatz next to the trace") {
  TempDir dir("hybrid");
  write_text(dir.file("zz.txt"), "1.0 ZZ\n");
  varqc::Circuit c;
  c.n = 2;
  c.gates = {varqc::Gate::h(0), varqc::Gate::cz(0, 1),
             varqc::Gate::rotation(varqc::PauliString::parse("XI"), "a")};
  c.params = {{"a", 0.2}};
  write_text(dir.file("circ.json"), varqc::circuit_to_json(c).dump());
  write_text(dir.file("hyb.cfg"),
             "kind = hybrid\nseed = 5\n[problem]\nhamiltonian = zz.txt\n"
             "[ansatz]\ncircuit = circ.json\npromote = [1]\n"
             "[optimizer]\nmax_iterations = 5\n");
  CliOverrides o;
  o.out_dir = dir.file("art").string();
  REQUIRE(run(dir.file("hyb.cfg").string(), o) == 0);
  const varqc::HybridAnsatz back = varqc::hybrid_from_json(
      json::parse(read_text(dir.file("art") / "ansatz.json")));
  CHECK(back.n == 2);
  CHECK(back.segments.size() == 3);
  const json summary = json::parse(read_text(dir.file("art") / "summary.json"));
  CHECK(summary.at("kind") == "hybrid");
  CHECK(summary.at("final_state").size() == 4);
}

TEST_CASE("the command line dispatches, validates, and gates kinds") {
  TempDir dir("cli");
  write_text(dir.file("ring.txt"), kRing3);
  write_text(dir.file("qaoa.cfg"),
             "kind = qaoa\nseed = 7\n[problem]\nhamiltonian = ring.txt\n"
             "[ansatz]\np = 1\n[optimizer]\nmax_iterations = 5\n");

  std::string out;
  std::string err;
  CHECK(cli({"validate", "--config", dir.file("qaoa.cfg").string()}, &out,
            &err) == 0);
  CHECK(out.find("ok") != std::string::npos);

  // The wrong subcommand for the config's kind is a validation failure.
  CHECK(cli({"check-controllability", "--config",
             dir.file("qaoa.cfg").string()},
            nullptr, &err) == 2);
  CHECK(err.find("kind") != std::string::npos);

  // `run` needs somewhere to put artifacts.
  CHECK(cli({"run", "--config", dir.file("qaoa.cfg").string()}, nullptr,
            &err) == 2);
  CHECK(err.find("out") != std::string::npos);

  CHECK(cli({"run", "--config", dir.file("qaoa.cfg").string(), "--out",
             (dir.path / "art").string()},
            &out, nullptr) == 0);
  CHECK(fs::exists(dir.path / "art" / "summary.json"));

  CHECK(cli({"bogus-subcommand"}) == 2);
  CHECK(cli({"run"}) == 2);  // --config is required
  CHECK(cli({"--help"}, &out) == 0);
  CHECK(out.find("Usage") != std::string::npos);
}

TEST_CASE("sampled runs honor the configured shot model") {
  TempDir dir("sampled");
  write_text(dir.file("z.txt"), "0.5 Z\n");
  write_text(dir.file("vqe.cfg"),
             "kind = vqe\nseed = 9\n[problem]\nhamiltonian = z.txt\n"
             "[ansatz]\nlayers = 1\n[optimizer]\nmax_iterations = 4\n"
             "method = nelder-mead\n[sampling]\nepsilon = 0.1\n"
             "allocation = weighted\n");
  CliOverrides o;
  o.out_dir = dir.file("art").string();
  const int code = run(dir.file("vqe.cfg").string(), o);
  REQUIRE((code == 0 || code == 1));
  const json summary = json::parse(read_text(dir.file("art") / "summary.json"));
  CHECK(summary.at("mode") == "sampled");
  // Every objective call pays ceil(lambda^2/epsilon^2) = 25 shots.
  CHECK(summary.at("total_shots").get<std::int64_t>() >= 25);
  CHECK(summary.at("total_shots").get<std::int64_t>() % 25 == 0);
}

}  // TEST_SUITE
