#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace synthcheck {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed schema, search-space or configuration document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Data that does not conform to its schema, or an operation applied to
/// columns that do not exist / have the wrong kind.
class DataError : public Error {
 public:
  using Error::Error;
};

class TypeMismatch : public DataError {
 public:
  TypeMismatch(std::size_t row, std::string column, const std::string& what)
      : DataError("type mismatch at row " + std::to_string(row) + ", column '" + column +
                  "': " + what),
        row_(row),
        column_(std::move(column)) {}

  /// 1-based data row (header excluded).
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

/// A nan/inf literal in a numeric cell. Kept apart from TypeMismatch because
/// generator output containing these is classified as invalid output.
class NonFiniteValue : public TypeMismatch {
 public:
  using TypeMismatch::TypeMismatch;
};

class MissingValue : public DataError {
 public:
  MissingValue(std::size_t row, std::string column)
      : DataError("missing value at row " + std::to_string(row) + " in column '" + column +
                  "' which does not allow missing values"),
        row_(row),
        column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

class GeneratorError : public Error {
 public:
  using Error::Error;
};

/// Generator ran but produced unusable data (null / non-finite cells, wrong
/// row count, schema violations).
class InvalidOutput : public GeneratorError {
 public:
  using GeneratorError::GeneratorError;
};

class GeneratorTimeout : public GeneratorError {
 public:
  using GeneratorError::GeneratorError;
};

}  // namespace synthcheck
