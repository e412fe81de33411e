// Copyright 2026 The latkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LATKIT_ERROR_HPP
#define LATKIT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace latkit {

/// Base class for all latkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input text (word-graph, grammar, update, corpus, ...).
/// `line` is 1-based; 0 means "no line information".
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// An exhaustive enumeration exceeded its guard.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// Invariant check for search-time assertions the contracts require.
#define LATKIT_CHECK(cond, msg)                                   \
  do {                                                            \
    if (!(cond)) throw std::logic_error(std::string("latkit invariant violated: ") + (msg)); \
  } while (0)

}  // namespace latkit

#endif  // LATKIT_ERROR_HPP
