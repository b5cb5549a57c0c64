/*
 * Copyright 2026 The vsmhl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef VSMHL_ERRORS_HPP
#define VSMHL_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vsmhl {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A model parameter or initial law breaks one or more invariants.
class ValidationError : public Error {
public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string> &violations() const noexcept {
    return violations_;
  }

private:
  static std::string join(const std::vector<std::string> &v) {
    std::string out = "validation failed";
    for (const auto &s : v) {
      out += ": ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Experiment or solver configuration that cannot be run.
class ConfigError : public Error {
public:
  using Error::Error;
};

class StepSizeError : public Error {
public:
  using Error::Error;
};

/// The particle system reached S^Y = 0; drift and noise both vanish.
class DegenerateStateError : public Error {
public:
  using Error::Error;
};

class GridMismatchError : public Error {
public:
  using Error::Error;
};

class SolverError : public Error {
public:
  using Error::Error;
};

} // namespace vsmhl

#endif // VSMHL_ERRORS_HPP
