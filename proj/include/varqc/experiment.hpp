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

#ifndef VARQC_EXPERIMENT_HPP_
#define VARQC_EXPERIMENT_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace varqc {

// Config files are declarative text: `key = value` lines grouped under
// `[section]` headers (keys flatten to section.key), `#` comments.
// Values starting with a digit, sign, quote, bracket, or brace must be
// valid JSON; anything else reads as a bare string. A file whose first
// character is `{` (or with a .json extension) is instead one JSON
// object whose top-level sub-objects play the role of sections. Throws
// ParseError with 1-based line/column on malformed input.
std::map<std::string, nlohmann::json> parse_config_text(
    const std::string& text);
std::map<std::string, nlohmann::json> parse_config_file(
    const std::string& path);

enum class ExperimentKind {
  Vqe,
  Qaoa,
  Pulse,
  Hybrid,
  DigitizeStudy,
  Controllability,
  LandscapeScan,
};
const char* to_string(ExperimentKind kind);

// One schema or cross-reference violation; `field` is the flattened
// config key (or file path) it concerns.
struct Diagnostic {
  std::string field;
  std::string message;
};
std::string to_string(const Diagnostic& d);

// Command-line overrides applied on top of the config file.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
};

// Parses and fully validates a config, collecting every violation
// instead of stopping at the first. Referenced files are opened and
// parsed as part of validation. Throws ParseError only for config-file
// syntax errors; everything else becomes a diagnostic.
std::vector<Diagnostic> validate_experiment(const std::string& config_path,
                                            const CliOverrides& overrides);

// Runs the configured experiment end to end and writes artifacts into
// the output directory (created if needed): summary.json always;
// trace.jsonl and trace.csv for optimization kinds; ansatz.json for
// hybrid; error_vs_r.csv for digitize studies; samples.csv plus
// variance.csv for landscape scans. Nothing is written unless
// validation passes, and identical (config, seed) pairs produce
// byte-identical files. Returns the process exit code: 0 on success,
// 1 when the optimizer stalls or a runtime error occurs, 2 for parse or
// validation failures, 3 for resource-cap violations. Human-readable
// status goes to `out`, errors and diagnostics to `err`.
// When `require_out_dir` is set and no output directory is configured the
// run is rejected before execution; without it, kinds whose whole result
// fits a single report print that report to `out` instead of writing files.
int run_experiment(const std::string& config_path,
                   const CliOverrides& overrides, std::ostream& out,
                   std::ostream& err,
                   std::optional<ExperimentKind> required_kind = {},
                   bool require_out_dir = true);

// Full command-line entry point (subcommands run, validate,
// check-controllability, scan-landscape, digitize).
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace varqc

#endif  // VARQC_EXPERIMENT_HPP_
