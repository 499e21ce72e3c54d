#pragma once

#include <stdexcept>
#include <string>

namespace predprey {

// Bad arguments: non-finite or negative state coordinates, parameters outside
// their admissible ranges, malformed grids, p-exponents outside {2,4}, ...
class InputDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Cholesky factor requested on an axis, where the covariance is singular.
// Callers must switch to the event factor or treat the state as absorbed.
class DegenerateCovarianceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive ODE step size collapsed (or the step budget ran out).
class StiffnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite state produced by the ODE integrator.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evaluation grid outside the simulated time range (or not increasing).
class GridRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A numerical invariant that should be unreachable was violated (e.g. a
// square-root radicand more negative than cancellation can explain).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace predprey
