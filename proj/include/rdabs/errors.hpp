#pragma once

#include <stdexcept>
#include <string>

namespace rdabs {

// Malformed configuration or user input. CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Expression text that cannot be parsed; carries the byte offset of the failure.
struct ParseError : std::runtime_error {
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " (at position " + std::to_string(position) + ")"),
        position(position) {}
  std::size_t position;
};

// Domain violation during evaluation: division by an interval containing zero,
// log of a non-positive argument, and the like. CLI exit code 3.
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numeric failure: non-finite dynamics output, factorization breakdown. CLI exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Work refused because it exceeds a configured resource guard. CLI exit code 4.
struct ResourceGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rdabs
