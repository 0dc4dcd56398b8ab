#pragma once

#include <stdexcept>
#include <string>

namespace fliess {

/// Root of the library's exception hierarchy. Every subclass maps to one CLI
/// exit code (see exit_code()).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

/// Map/RRT/smoothing/spline failures.
class PlanningError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Preconditions of the left-inversion formula are not met: missing relative
/// degree or violated output matching conditions.
class InversionError : public Error {
 public:
  enum class Kind { kNoRelativeDegree, kMatchingViolation };

  InversionError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }
  int exit_code() const noexcept override { return 3; }

 private:
  Kind kind_;
};

/// Numeric singularities: singular decoupling matrix or constant term, poles in
/// expression evaluation, blow-up during integration.
class SingularityError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

/// The decoupling matrix of a vector relative degree is rank deficient.
class SingularDecouplingError : public SingularityError {
 public:
  using SingularityError::SingularityError;
};

}  // namespace fliess
