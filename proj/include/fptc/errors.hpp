#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fptc {

/// Base for every error the toolkit raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (model JSON, rule files, CSV, configs).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A structurally valid document that references something missing or
/// violates a model invariant needed by the requested operation.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Rules that cannot be attached to the model.
class BindError : public Error {
 public:
  using Error::Error;
};

/// Fault-tree generation or analysis failure.
class AnalysisError : public Error {
 public:
  using Error::Error;
};

/// Simulation preconditions not met (missing series, bad bench).
class SimulationError : public Error {
 public:
  using Error::Error;
};

/// The requested failure cannot be injected under the configured constraints.
class InjectionError : public Error {
 public:
  using Error::Error;
};

}  // namespace fptc
