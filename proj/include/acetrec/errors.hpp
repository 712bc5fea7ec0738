#pragma once

#include <stdexcept>
#include <string>

namespace acetrec {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside its documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Input geometry is too degenerate to process (collinear, zero length, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A point lies at or behind the camera plane.
class ProjectionError : public Error {
 public:
  ProjectionError(const std::string& what, long index) : Error(what), index_(index) {}
  /// Offending vertex (or correspondence) index.
  long index() const { return index_; }

 private:
  long index_;
};

/// Damped Gauss-Newton could not find a descent step.
class SolverStallError : public Error {
 public:
  using Error::Error;
};

/// Sphere fit on coplanar or otherwise insufficient data.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Experiment setup cannot be realized (e.g. target behind a camera).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Broken internal invariant.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written, or is malformed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace acetrec
