#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or incomplete run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input outside the domain of an operation (nonpositive mass, grid too small, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// The drift matrix has an eigenvalue with nonnegative real part: no steady state.
class StabilityError : public Error {
 public:
  StabilityError(const std::string& what, std::vector<std::complex<double>> eigenvalues)
      : Error(what), eigenvalues_(std::move(eigenvalues)) {}
  const std::vector<std::complex<double>>& eigenvalues() const { return eigenvalues_; }

 private:
  std::vector<std::complex<double>> eigenvalues_;
};

// Solver, quadrature or eigen-decomposition failure. `estimate` carries the
// residual or error estimate that tripped the check, when there is one.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, double estimate = 0.0)
      : Error(what), estimate_(estimate) {}
  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

}  // namespace hsq
