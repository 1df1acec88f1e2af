#pragma once

#include <stdexcept>
#include <string>

namespace rmtcov {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape or size mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A matrix is too ill-conditioned for the requested operation.
class IllConditionedError : public Error {
 public:
  using Error::Error;
};

/// Evaluation requested at (or numerically on top of) a pole.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// A bracketed root search found no sign change.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// Contour quadrature failed to converge within the node budget.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// Sample spectrum has coincident eigenvalues beyond what the closed
/// forms tolerate; callers jitter and retry.
class DegenerateSpectrumError : public Error {
 public:
  using Error::Error;
};

/// Second-order retraction left the positive-definite cone.
class StepTooLargeError : public Error {
 public:
  using Error::Error;
};

/// Line search could not decrease the objective.
class StallError : public Error {
 public:
  using Error::Error;
};

/// Input regime violates a method precondition (e.g. p >= n).
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Eigensolver or other numerical routine failed outright.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace rmtcov
