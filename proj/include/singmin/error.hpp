#ifndef SINGMIN_ERROR_HPP
#define SINGMIN_ERROR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace singmin {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Precondition on a scalar/argument violated.
class ArgumentError : public Error {
public:
  using Error::Error;
};

/// A domain could not be built (empty interior, bad spec).
class ConstructionError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// Field is degenerate for the requested functional (zero mean, -inf log-mean).
class DegenerateFieldError : public Error {
public:
  using Error::Error;
};

/// Iterative solver hit its cap; carries the last iterate (nodal values).
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate)
      : Error(what), last_iterate_(std::move(last_iterate)) {}

  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

private:
  std::vector<double> last_iterate_;
};

/// Multistart minimizers disagree beyond tolerance.
class NonuniquenessError : public Error {
public:
  using Error::Error;
};

/// A converged solution violates an analytic bracket it must satisfy.
class SolverDefectError : public Error {
public:
  using Error::Error;
};

/// Shooting failed to bracket or integrate.
class OracleError : public Error {
public:
  using Error::Error;
};

/// Input records do not satisfy an operation's data contract.
class DataError : public Error {
public:
  using Error::Error;
};

}  // namespace singmin

#endif  // SINGMIN_ERROR_HPP
