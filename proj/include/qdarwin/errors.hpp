#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace qdarwin {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  DimensionError(const std::string& what, std::size_t expected, std::size_t actual)
      : Error(what + ": expected dimension " + std::to_string(expected) + ", got " +
              std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

class NotHermitianError : public Error {
 public:
  explicit NotHermitianError(double residual)
      : Error("matrix is not Hermitian (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Input violates a density-matrix or derivative invariant.
class InvalidStateError : public Error {
 public:
  InvalidStateError(std::string invariant, double value)
      : Error("invalid state: " + invariant + " (value " + std::to_string(value) + ")"),
        invariant_(std::move(invariant)),
        value_(value) {}

  const std::string& invariant() const noexcept { return invariant_; }
  double value() const noexcept { return value_; }

 private:
  std::string invariant_;
  double value_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class EmptyFragmentError : public Error {
 public:
  EmptyFragmentError() : Error("empty fragment: fragment_size must be >= 1") {}
};

/// Singular parameter point (e.g. tan/cot poles of the SLD, zero QFI).
class SingularPointError : public Error {
 public:
  using Error::Error;
};

/// Regime the closed forms do not cover (zero-mean couplings in the thermodynamic limit).
class UnsupportedRegimeError : public Error {
 public:
  using Error::Error;
};

class SizeCapError : public Error {
 public:
  SizeCapError(std::size_t n_qubits, std::size_t cap)
      : Error("statevector size cap exceeded: " + std::to_string(n_qubits) + " qubits > " +
              std::to_string(cap)) {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qdarwin
