#ifndef MDLNMF_ERRORS_HPP
#define MDLNMF_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mdlnmf {

// Problems with the input itself: files, shapes, sample contents.
// The CLI maps these to exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failures of the numerics: divergence, iteration budgets, infeasible
// constraint targets. The CLI maps these to exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NegativeEntryError : DataError {
  NegativeEntryError(std::ptrdiff_t row_, std::ptrdiff_t col_, double value_)
      : DataError("negative entry " + std::to_string(value_) + " at (" +
                  std::to_string(row_) + ", " + std::to_string(col_) + ")"),
        row(row_), col(col_), value(value_) {}
  std::ptrdiff_t row;
  std::ptrdiff_t col;
  double value;
};

struct NonFiniteEntryError : DataError {
  NonFiniteEntryError(std::ptrdiff_t row_, std::ptrdiff_t col_)
      : DataError("non-finite entry at (" + std::to_string(row_) + ", " +
                  std::to_string(col_) + ")"),
        row(row_), col(col_) {}
  std::ptrdiff_t row;
  std::ptrdiff_t col;
};

struct ShapeMismatchError : DataError {
  using DataError::DataError;
};

struct TooFewSamplesError : DataError {
  explicit TooFewSamplesError(std::size_t got)
      : DataError("need at least 2 samples, got " + std::to_string(got)) {}
};

struct NonFiniteSampleError : DataError {
  NonFiniteSampleError() : DataError("sample sequence contains a non-finite value") {}
};

struct NonPositiveSampleError : DataError {
  explicit NonPositiveSampleError(double value)
      : DataError("sample " + std::to_string(value) + " is not strictly positive") {}
};

struct EmptySamplesError : DataError {
  EmptySamplesError() : DataError("sample sequence is empty") {}
};

struct RaggedRowsError : DataError {
  RaggedRowsError(std::size_t line, std::size_t expected, std::size_t got)
      : DataError("line " + std::to_string(line) + ": expected " +
                  std::to_string(expected) + " fields, got " + std::to_string(got)) {}
};

struct ParseError : DataError {
  ParseError(std::size_t line_, const std::string& reason_)
      : DataError("line " + std::to_string(line_) + ": " + reason_),
        line(line_), reason(reason_) {}
  std::size_t line;
  std::string reason;
};

struct MissingInputError : DataError {
  using DataError::DataError;
};

struct ZeroVectorError : DataError {
  ZeroVectorError() : DataError("vector has zero norm") {}
};

struct LengthOneError : DataError {
  LengthOneError() : DataError("vector must have at least 2 elements") {}
};

struct ZeroInitialValueError : DataError {
  explicit ZeroInitialValueError(const std::string& series)
      : DataError("trace series '" + series + "' starts at zero, cannot normalize") {}
};

struct InfeasibleTargetError : NumericError {
  using NumericError::NumericError;
};

struct NoConvergenceError : NumericError {
  using NumericError::NumericError;
};

struct DivergedError : NumericError {
  using NumericError::NumericError;
};

}  // namespace mdlnmf

#endif  // MDLNMF_ERRORS_HPP
