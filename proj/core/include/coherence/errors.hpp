#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coherence {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidSizeError : public Error {
 public:
  using Error::Error;
};

class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

class GraphInvariantError : public Error {
 public:
  using Error::Error;
};

/// Malformed edge-list or config text. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A mode (or system) that is required to be Hurwitz is not. `mode()` is the
/// 1-based mode index, or 0 for whole-system checks.
class InstabilityError : public Error {
 public:
  explicit InstabilityError(const std::string& what, int mode = 0)
      : Error(what), mode_(mode) {}
  int mode() const noexcept { return mode_; }

 private:
  int mode_;
};

/// Some observable mode is marginal, so the per-node variance is infinite.
class UnboundedVarianceError : public Error {
 public:
  UnboundedVarianceError(const std::string& what, int mode)
      : Error(what), mode_(mode) {}
  int mode() const noexcept { return mode_; }

 private:
  int mode_;
};

/// F-DPD with tau == 0 is the ideal PD law; callers must go through P control
/// with g0 replaced by K_D.
class IdealPdRedirect : public Error {
 public:
  using Error::Error;
};

class SearchError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class StepSizeError : public Error {
 public:
  using Error::Error;
};

class WindowError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace coherence
