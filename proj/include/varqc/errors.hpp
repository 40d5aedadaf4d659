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

#ifndef VARQC_ERRORS_HPP_
#define VARQC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace varqc {

// Error in a user-supplied text or config input. Positions are 1-based;
// col == 0 means "whole line".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int line, int col = 0)
      : std::runtime_error(format(message, line, col)),
        line_(line),
        col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

 private:
  static std::string format(const std::string& message, int line, int col) {
    std::string s = "line " + std::to_string(line);
    if (col > 0) s += ", col " + std::to_string(col);
    return s + ": " + message;
  }

  int line_;
  int col_;
};

// Raised when a request exceeds a configured resource cap (for example the
// dense-matrix qubit limit). Callers can catch this to exit with a distinct
// status instead of attempting the allocation.
class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& message)
      : std::runtime_error(message) {}
};

}  // namespace varqc

#endif  // VARQC_ERRORS_HPP_
