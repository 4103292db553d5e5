#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "synthcheck/dataset.hpp"

namespace synthcheck {

/// Parsed schema document: the column list plus the optional survival block.
struct SchemaDocument {
  Schema columns;
  std::optional<SurvivalColumns> survival;
};

/// Parses the JSON schema document
/// {"columns":[{"name","kind","roles","missing_allowed"}], "survival":{...}}.
/// Throws SchemaError on malformed input, duplicate names or unknown kinds.
SchemaDocument parse_schema(std::string_view text);
SchemaDocument load_schema(const std::filesystem::path& path);
std::string schema_to_json(const SchemaDocument& doc);

/// Reads a comma-separated file with a header row. Header columns may come in
/// any order but must match the schema names exactly; the result is in schema
/// order. Cells equal to missing_token are missing.
Dataset read_csv(std::istream& in, const Schema& schema, std::string_view missing_token = "");
Dataset load_csv(const std::filesystem::path& path, const Schema& schema,
                 std::string_view missing_token = "");

void write_csv(std::ostream& out, const Dataset& ds, std::string_view missing_token = "");
void save_csv(const std::filesystem::path& path, const Dataset& ds,
              std::string_view missing_token = "");

/// Shortest text that parses back to the same double.
std::string format_number(double value);

}  // namespace synthcheck
