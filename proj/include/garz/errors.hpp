#pragma once

#include <stdexcept>
#include <string>

namespace garz {

/// Base class for every error raised by the solver kit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain where a function is defined.
class InputRangeError : public Error {
 public:
  using Error::Error;
};

/// Initial data violates a structural requirement (bounds, sign, support).
class InvalidDataError : public Error {
 public:
  using Error::Error;
};

class GridMismatchError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold (e.g. CFL).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class UnsupportedModelError : public Error {
 public:
  using Error::Error;
};

/// An explicit scheme produced NaN or left its stability region.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// A computed state breached one of the a-priori bounds.
class InvariantBreachError : public Error {
 public:
  InvariantBreachError(std::string bound, double violation, double time)
      : Error("invariant breach: " + bound + " violated by " +
              std::to_string(violation) + " at t=" + std::to_string(time)),
        bound_(std::move(bound)),
        violation_(violation),
        time_(time) {}

  const std::string& bound() const { return bound_; }
  double violation() const { return violation_; }
  double time() const { return time_; }

 private:
  std::string bound_;
  double violation_;
  double time_;
};

/// Two runs share their initial data, so a stability ratio is undefined.
class DegeneratePairError : public Error {
 public:
  using Error::Error;
};

}  // namespace garz
