#pragma once

#include <stdexcept>
#include <string>

namespace covep {

/// A caller broke a precondition (dimension mismatch, bad step size, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a partial map (e.g. log beyond the
/// injectivity radius).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Construction of a model object failed validation (non-SPD metric,
/// Jacobi identity violated, ...).
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical computation produced a non-finite value or could not meet its
/// tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reconstruction refused because the input is not flat enough.
class FlatnessError : public NumericalError {
 public:
  FlatnessError(const std::string& what, double max_curvature)
      : NumericalError(what), max_curvature_(max_curvature) {}

  double max_curvature() const noexcept { return max_curvature_; }

 private:
  double max_curvature_;
};

/// Malformed input file or configuration.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace covep
