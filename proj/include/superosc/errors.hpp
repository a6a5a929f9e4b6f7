#pragma once

#include <stdexcept>
#include <string>

namespace superosc {

/// Base of every error raised by the core modules.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an operation's precondition on its inputs does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class OverflowRegime : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class PhaseLockViolation : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class QuadratureNoConvergence : public Error {
 public:
  QuadratureNoConvergence(const std::string& what, double estimate)
      : Error(what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

class NodeError : public Error {
 public:
  using Error::Error;
};

class EdgeError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public Error {
 public:
  using Error::Error;
};

class InfraredError : public Error {
 public:
  using Error::Error;
};

class GridUnderresolved : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class DegenerateDenominator : public Error {
 public:
  using Error::Error;
};

class CutoffMissing : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

}  // namespace superosc
