#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace pdelab {

/// Operand dimensions do not agree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value violates an operation precondition (ranges, ratios, counts).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Normal-equation matrix or design matrix is rank deficient.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tridiagonal elimination hit a zero pivot.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid too coarse for the requested discretization.
class InvalidGridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or incomplete experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A required input file or directory does not exist.
class MissingInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pipeline stage failed; wraps the original message with stage context.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what, int exit_code)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), exit_code_(exit_code) {}

  const std::string& stage() const noexcept { return stage_; }
  int exit_code() const noexcept { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

}  // namespace pdelab

namespace pdelab {

/// Data generation failed for one parameter sample.
class SampleError : public std::runtime_error {
 public:
  SampleError(std::size_t index, const std::string& what)
      : std::runtime_error("sample " + std::to_string(index) + ": " + what), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace pdelab
