#ifndef L1PDA_ERRORS_HPP
#define L1PDA_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace l1pda {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A matrix that must be inverted is numerically singular.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& msg, double min_eigenvalue)
      : Error(msg), min_eigenvalue(min_eigenvalue) {}
  double min_eigenvalue;
};

// log_det of a matrix whose spectrum is not strictly positive.
class NotPositiveDefiniteError : public Error {
 public:
  NotPositiveDefiniteError(const std::string& msg, double min_eigenvalue)
      : Error(msg), min_eigenvalue(min_eigenvalue) {}
  double min_eigenvalue;
};

// The estimation problem has no well-defined solution: rank-deficient
// pooled covariance (bad for every lambda), or lambda = 0 with a
// singular class covariance.
class IllPosedError : public Error {
 public:
  using Error::Error;
};

// A dataset violating the basic requirements: n >= 2, both classes
// present, all features finite.
class InvalidDatasetError : public Error {
 public:
  using Error::Error;
};

// A lambda grid that cannot be built (lambda_max = 0 or epsilon making
// the values non-decreasing).
class DegenerateGridError : public Error {
 public:
  using Error::Error;
};

// A cross-validation fold whose training part lost one of the classes.
class StratificationError : public Error {
 public:
  using Error::Error;
};

// ROC requested for scores that contain only one class.
class RocError : public Error {
 public:
  using Error::Error;
};

// CSV input that cannot be parsed.  row/column are 1-based positions of
// the offending cell when known (0 otherwise); row counts the header.
class CsvError : public Error {
 public:
  explicit CsvError(const std::string& msg, std::size_t row = 0, std::size_t column = 0)
      : Error(msg), row(row), column(column) {}
  std::size_t row;
  std::size_t column;
};

// Model file with missing fields, an unsupported format_version, or
// inconsistent contents.
class ModelFormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace l1pda

#endif  // L1PDA_ERRORS_HPP
