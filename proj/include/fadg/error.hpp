// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace fadg {

/// Invalid user input: mesh parameters, config keys, coefficient files.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Coefficient file could not be parsed. Carries the 1-based line number.
class ParseError : public ConfigError {
public:
  ParseError(const std::string& what, int line)
      : ConfigError(what), line_(line) {}
  [[nodiscard]] int line() const noexcept { return line_; }

private:
  int line_;
};

/// Internal geometric inconsistency (interface ranges that do not match).
class GeometryError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Linear algebra failure: non-SPD mass block, factorization breakdown,
/// missing eigenpairs after all retries.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class FactorizationBreakdown : public SolverError {
public:
  using SolverError::SolverError;
};

class CompletenessError : public SolverError {
public:
  using SolverError::SolverError;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace fadg
