#pragma once

#include <stdexcept>
#include <string>

namespace teachcert {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// model / scenario
class SchemaError : public Error { using Error::Error; };
class InvariantViolation : public Error { using Error::Error; };
class EmptyVersionSpace : public Error { using Error::Error; };
class OutOfBounds : public Error { using Error::Error; };

// belief
class ZeroProbabilityObservation : public Error {
 public:
  ZeroProbabilityObservation(const std::string& what, std::size_t step)
      : Error(what), step_(step) {}
  explicit ZeroProbabilityObservation(const std::string& what)
      : ZeroProbabilityObservation(what, 0) {}
  /// Index of the failing plan step (0 when raised by a single update).
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// polynomial
class RingMismatch : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };

// dsos
class OddDegree : public Error { using Error::Error; };
class InvalidPerformance : public Error { using Error::Error; };

// lp
class IterationLimit : public Error { using Error::Error; };
class NumericalBreakdown : public Error { using Error::Error; };
class AuditFailed : public Error { using Error::Error; };

// oracle
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, int attainable_depth)
      : Error(what), depth_(attainable_depth) {}
  /// Deepest level that was fully expanded before the budget ran out.
  int attainable_depth() const { return depth_; }

 private:
  int depth_;
};

}  // namespace teachcert
