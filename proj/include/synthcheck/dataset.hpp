#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace synthcheck {

enum class ColumnKind { binary, categorical, integer, floating };

enum class ColumnRole { outcome, survival_time, survival_status };

std::string_view to_string(ColumnKind kind) noexcept;
std::string_view to_string(ColumnRole role) noexcept;
ColumnKind parse_kind(std::string_view text);
/// Returns nullopt for "none".
std::optional<ColumnRole> parse_role(std::string_view text);

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::floating;
  std::vector<ColumnRole> roles;
  bool missing_allowed = false;

  bool numeric() const noexcept {
    return kind == ColumnKind::integer || kind == ColumnKind::floating;
  }
  /// Binary and categorical columns: compared by category, one-hot encoded.
  bool discrete() const noexcept { return !numeric(); }
  bool has_role(ColumnRole role) const noexcept;

  bool operator==(const ColumnSchema&) const = default;
};

using Schema = std::vector<ColumnSchema>;

/// Names of the survival columns. efstm_dif is the derived column that
/// replaces EFSTM while a generator is trained.
struct SurvivalColumns {
  std::string ostm;
  std::string efstm;
  std::string osstat;
  std::string efsstat;
  std::string efstm_dif = "EFSTM_dif";

  bool operator==(const SurvivalColumns&) const = default;
};

/// One cell as seen from the outside: missing, a number (binary, integer and
/// float kinds) or a label (categorical kind).
using Cell = std::variant<std::monostate, double, std::string>;

/// Column-major table. Numeric-kind cells are doubles with NaN marking a
/// missing cell; non-finite values never enter a Dataset through parsing.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(Schema schema);

  /// Builds and validates a dataset from row-major cells.
  static Dataset from_rows(Schema schema, const std::vector<std::vector<Cell>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return schema_.size(); }
  bool empty() const noexcept { return rows_ == 0; }

  const Schema& schema() const noexcept { return schema_; }
  const ColumnSchema& column_schema(std::size_t c) const { return schema_.at(c); }
  std::optional<std::size_t> find(std::string_view name) const noexcept;
  /// Throws DataError when the column is absent.
  std::size_t index_of(std::string_view name) const;

  bool is_missing(std::size_t r, std::size_t c) const;
  /// Value of a non-categorical cell; NaN if missing.
  double number(std::size_t r, std::size_t c) const { return columns_[c].numbers[r]; }
  /// Label of a categorical cell; throws if missing.
  const std::string& label(std::size_t r, std::size_t c) const;
  /// Category key of a discrete cell ("0"/"1" for binary); nullopt if missing.
  std::optional<std::string> category(std::size_t r, std::size_t c) const;
  Cell cell(std::size_t r, std::size_t c) const;

  /// Column values of a non-categorical column (NaN = missing).
  std::span<const double> numbers(std::size_t c) const { return columns_[c].numbers; }

  void add_row(const std::vector<Cell>& cells);
  void set_cell(std::size_t r, std::size_t c, const Cell& value);
  void set_number(std::size_t r, std::size_t c, double value) { columns_[c].numbers[r] = value; }

  /// Rows in the given order (indices may repeat).
  Dataset select_rows(std::span<const std::size_t> indices) const;
  /// Appends rows of a dataset with an identical schema.
  void append(const Dataset& other);

  /// Replaces column c (schema and values). Values must have rows() entries.
  void replace_column(std::size_t c, ColumnSchema schema, std::vector<Cell> values);
  void insert_column(std::size_t position, ColumnSchema schema, std::vector<Cell> values);
  void remove_column(std::size_t c);

  /// Checks kind conformance and missing_allowed for every cell.
  void validate() const;

  std::size_t missing_count() const;

  bool operator==(const Dataset& other) const;

 private:
  struct Column {
    std::vector<double> numbers;
    std::vector<std::optional<std::string>> labels;
  };

  void check_unique_names() const;
  static void store(Column& column, const ColumnSchema& schema, const Cell& value);
  static bool same_number(double a, double b) noexcept;

  Schema schema_;
  std::vector<Column> columns_;
  std::size_t rows_ = 0;
};

/// Columns that are binary and carry the outcome role, in schema order.
std::vector<std::string> binary_outcome_columns(const Schema& schema);

/// FNV-1a digest over schema and cell contents; stable across runs.
std::uint64_t dataset_hash(const Dataset& ds);

}  // namespace synthcheck
