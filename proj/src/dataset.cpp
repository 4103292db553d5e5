#include "synthcheck/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <cstring>
#include <limits>
#include <set>

#include "synthcheck/error.hpp"

namespace synthcheck {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string_view to_string(ColumnKind kind) noexcept {
  switch (kind) {
    case ColumnKind::binary: return "binary";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::integer: return "integer";
    case ColumnKind::floating: return "float";
  }
  return "float";
}

std::string_view to_string(ColumnRole role) noexcept {
  switch (role) {
    case ColumnRole::outcome: return "outcome";
    case ColumnRole::survival_time: return "survival_time";
    case ColumnRole::survival_status: return "survival_status";
  }
  return "none";
}

ColumnKind parse_kind(std::string_view text) {
  if (text == "binary") return ColumnKind::binary;
  if (text == "categorical") return ColumnKind::categorical;
  if (text == "integer") return ColumnKind::integer;
  if (text == "float") return ColumnKind::floating;
  throw SchemaError("unknown column kind '" + std::string(text) + "'");
}

std::optional<ColumnRole> parse_role(std::string_view text) {
  if (text == "outcome") return ColumnRole::outcome;
  if (text == "survival_time") return ColumnRole::survival_time;
  if (text == "survival_status") return ColumnRole::survival_status;
  if (text == "none") return std::nullopt;
  throw SchemaError("unknown column role '" + std::string(text) + "'");
}

bool ColumnSchema::has_role(ColumnRole role) const noexcept {
  return std::find(roles.begin(), roles.end(), role) != roles.end();
}

Dataset::Dataset(Schema schema) : schema_(std::move(schema)), columns_(schema_.size()) {
  check_unique_names();
}

Dataset Dataset::from_rows(Schema schema, const std::vector<std::vector<Cell>>& rows) {
  Dataset ds(std::move(schema));
  for (const auto& row : rows) ds.add_row(row);
  ds.validate();
  return ds;
}

void Dataset::check_unique_names() const {
  std::set<std::string_view> seen;
  for (const auto& col : schema_) {
    if (!seen.insert(col.name).second) {
      throw SchemaError("duplicate column '" + col.name + "'");
    }
  }
}

std::optional<std::size_t> Dataset::find(std::string_view name) const noexcept {
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    if (schema_[c].name == name) return c;
  }
  return std::nullopt;
}

std::size_t Dataset::index_of(std::string_view name) const {
  if (auto c = find(name)) return *c;
  throw DataError("column '" + std::string(name) + "' not found");
}

bool Dataset::is_missing(std::size_t r, std::size_t c) const {
  if (schema_[c].kind == ColumnKind::categorical) return !columns_[c].labels[r].has_value();
  return std::isnan(columns_[c].numbers[r]);
}

const std::string& Dataset::label(std::size_t r, std::size_t c) const {
  const auto& v = columns_[c].labels.at(r);
  if (!v) throw DataError("missing label at row " + std::to_string(r) + " in '" + schema_[c].name + "'");
  return *v;
}

std::optional<std::string> Dataset::category(std::size_t r, std::size_t c) const {
  const auto& schema = schema_[c];
  if (schema.kind == ColumnKind::categorical) return columns_[c].labels[r];
  const double v = columns_[c].numbers[r];
  if (std::isnan(v)) return std::nullopt;
  if (schema.kind == ColumnKind::binary) return v != 0.0 ? std::string("1") : std::string("0");
  // Integer/float used as a category: canonical shortest text.
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

Cell Dataset::cell(std::size_t r, std::size_t c) const {
  if (is_missing(r, c)) return std::monostate{};
  if (schema_[c].kind == ColumnKind::categorical) return *columns_[c].labels[r];
  return columns_[c].numbers[r];
}

void Dataset::store(Column& column, const ColumnSchema& schema, const Cell& value) {
  if (schema.kind == ColumnKind::categorical) {
    if (std::holds_alternative<std::monostate>(value)) {
      column.labels.emplace_back(std::nullopt);
    } else if (const auto* s = std::get_if<std::string>(&value)) {
      column.labels.emplace_back(*s);
    } else {
      // Numeric label given for a categorical column: use its text form.
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(value));
      column.labels.emplace_back(std::string(buf));
    }
    return;
  }
  if (std::holds_alternative<std::monostate>(value)) {
    column.numbers.push_back(kNaN);
  } else if (const auto* d = std::get_if<double>(&value)) {
    column.numbers.push_back(*d);
  } else {
    throw DataError("string value for non-categorical column '" + schema.name + "'");
  }
}

void Dataset::add_row(const std::vector<Cell>& cells) {
  if (cells.size() != schema_.size()) {
    throw DataError("row has " + std::to_string(cells.size()) + " cells, schema has " +
                    std::to_string(schema_.size()) + " columns");
  }
  for (std::size_t c = 0; c < cells.size(); ++c) store(columns_[c], schema_[c], cells[c]);
  ++rows_;
}

void Dataset::set_cell(std::size_t r, std::size_t c, const Cell& value) {
  Column tmp;
  store(tmp, schema_[c], value);
  if (schema_[c].kind == ColumnKind::categorical) {
    columns_[c].labels.at(r) = std::move(tmp.labels.front());
  } else {
    columns_[c].numbers.at(r) = tmp.numbers.front();
  }
}

Dataset Dataset::select_rows(std::span<const std::size_t> indices) const {
  Dataset out(schema_);
  out.rows_ = indices.size();
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    const auto& src = columns_[c];
    auto& dst = out.columns_[c];
    if (schema_[c].kind == ColumnKind::categorical) {
      dst.labels.reserve(indices.size());
      for (auto i : indices) dst.labels.push_back(src.labels.at(i));
    } else {
      dst.numbers.reserve(indices.size());
      for (auto i : indices) dst.numbers.push_back(src.numbers.at(i));
    }
  }
  return out;
}

void Dataset::append(const Dataset& other) {
  if (other.schema_ != schema_) throw DataError("cannot append datasets with different schemas");
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    auto& dst = columns_[c];
    const auto& src = other.columns_[c];
    dst.numbers.insert(dst.numbers.end(), src.numbers.begin(), src.numbers.end());
    dst.labels.insert(dst.labels.end(), src.labels.begin(), src.labels.end());
  }
  rows_ += other.rows_;
}

void Dataset::replace_column(std::size_t c, ColumnSchema schema, std::vector<Cell> values) {
  if (values.size() != rows_) throw DataError("replacement column has wrong length");
  Column col;
  for (const auto& v : values) store(col, schema, v);
  schema_.at(c) = std::move(schema);
  columns_[c] = std::move(col);
  check_unique_names();
}

void Dataset::insert_column(std::size_t position, ColumnSchema schema, std::vector<Cell> values) {
  if (values.size() != rows_) throw DataError("inserted column has wrong length");
  if (position > schema_.size()) throw DataError("column position out of range");
  Column col;
  for (const auto& v : values) store(col, schema, v);
  schema_.insert(schema_.begin() + static_cast<std::ptrdiff_t>(position), std::move(schema));
  columns_.insert(columns_.begin() + static_cast<std::ptrdiff_t>(position), std::move(col));
  check_unique_names();
}

void Dataset::remove_column(std::size_t c) {
  schema_.erase(schema_.begin() + static_cast<std::ptrdiff_t>(c));
  columns_.erase(columns_.begin() + static_cast<std::ptrdiff_t>(c));
}

void Dataset::validate() const {
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    const auto& s = schema_[c];
    for (std::size_t r = 0; r < rows_; ++r) {
      if (is_missing(r, c)) {
        if (!s.missing_allowed) throw MissingValue(r + 1, s.name);
        continue;
      }
      if (s.kind == ColumnKind::categorical) continue;
      const double v = columns_[c].numbers[r];
      if (!std::isfinite(v)) throw NonFiniteValue(r + 1, s.name, "non-finite value");
      if (s.kind == ColumnKind::binary && v != 0.0 && v != 1.0) {
        throw TypeMismatch(r + 1, s.name, "binary value must be 0 or 1");
      }
      if (s.kind == ColumnKind::integer && v != std::trunc(v)) {
        throw TypeMismatch(r + 1, s.name, "integer column holds a fractional value");
      }
    }
  }
}

std::size_t Dataset::missing_count() const {
  std::size_t n = 0;
  for (std::size_t c = 0; c < cols(); ++c) {
    for (std::size_t r = 0; r < rows_; ++r) n += is_missing(r, c) ? 1 : 0;
  }
  return n;
}

bool Dataset::same_number(double a, double b) noexcept {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::memcmp(&a, &b, sizeof a) == 0;
}

bool Dataset::operator==(const Dataset& other) const {
  if (schema_ != other.schema_ || rows_ != other.rows_) return false;
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    if (columns_[c].labels != other.columns_[c].labels) return false;
    const auto& a = columns_[c].numbers;
    const auto& b = other.columns_[c].numbers;
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (!same_number(a[r], b[r])) return false;
    }
  }
  return true;
}

std::vector<std::string> binary_outcome_columns(const Schema& schema) {
  std::vector<std::string> out;
  for (const auto& c : schema) {
    if (c.kind == ColumnKind::binary && c.has_role(ColumnRole::outcome)) out.push_back(c.name);
  }
  return out;
}

std::uint64_t dataset_hash(const Dataset& ds) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  for (std::size_t c = 0; c < ds.cols(); ++c) {
    const auto& s = ds.column_schema(c);
    mix(s.name.data(), s.name.size());
    const auto kind = static_cast<int>(s.kind);
    mix(&kind, sizeof kind);
    for (std::size_t r = 0; r < ds.rows(); ++r) {
      if (ds.is_missing(r, c)) {
        const char m = 0x7f;
        mix(&m, 1);
      } else if (s.kind == ColumnKind::categorical) {
        const auto& l = ds.label(r, c);
        mix(l.data(), l.size());
        const char sep = 0x1f;
        mix(&sep, 1);
      } else {
        const double v = ds.number(r, c);
        mix(&v, sizeof v);
      }
    }
  }
  return h;
}

}  // namespace synthcheck
