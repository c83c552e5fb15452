#pragma once

#include <stdexcept>
#include <string>

namespace sng {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A field carried NaN/Inf samples or did not match its grid.
class InvalidField : public Error {
 public:
  using Error::Error;
};

/// Both ends of a shooting bracket fall on the same side of the requested state.
class InvalidBracket : public Error {
 public:
  using Error::Error;
};

/// Bisection converged onto a state with an unexpected node count.
class WrongState : public Error {
 public:
  using Error::Error;
};

/// The nonlinear corrector changed the potential too much within one step.
class StepRejected : public Error {
 public:
  StepRejected(const std::string& what, double suggested_dt)
      : Error(what), suggested_dt_(suggested_dt) {}

  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

}  // namespace sng
