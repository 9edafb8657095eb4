#pragma once

#include <stdexcept>
#include <string>

namespace ekg {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad run configuration or invalid operation parameters (CLI exit code 2).
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Sampled data family violates its defining inequalities.
struct FamilyError : ConfigError {
  explicit FamilyError(const std::string& msg) : ConfigError(msg) {}
};

// Field passed with the wrong parity about the axis.
struct ParityError : Error {
  explicit ParityError(const std::string& msg) : Error(msg) {}
};

// Runtime numerical failure: NaN/Inf fields, non-convergent cell solves
// (CLI exit code 3).
struct NumericalError : Error {
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

// The Hamiltonian constraint quadrature hit D(r) >= 1: the slice carries
// infinite energy in the e^{-2beta} variable and the gauge cannot be solved.
struct GaugeSingularityError : NumericalError {
  explicit GaugeSingularityError(const std::string& msg) : NumericalError(msg) {}
};

// Null chart construction failed (CFL violation, degenerate Jacobian,
// orientation loss).
struct ChartError : NumericalError {
  explicit ChartError(const std::string& msg) : NumericalError(msg) {}
};

}  // namespace ekg
