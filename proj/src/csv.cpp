#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "synthcheck/error.hpp"
#include "synthcheck/io.hpp"

namespace synthcheck {

namespace {

using nlohmann::json;

void check_survival(const SchemaDocument& doc) {
  if (!doc.survival) return;
  const auto& sc = *doc.survival;
  auto lookup = [&doc](const std::string& name, std::string_view field) -> const ColumnSchema& {
    for (const auto& c : doc.columns) {
      if (c.name == name) return c;
    }
    throw SchemaError("survival." + std::string(field) + " names unknown column '" + name + "'");
  };
  if (!lookup(sc.ostm, "ostm").numeric()) throw SchemaError("survival time '" + sc.ostm + "' must be numeric");
  if (!lookup(sc.efstm, "efstm").numeric()) throw SchemaError("survival time '" + sc.efstm + "' must be numeric");
  if (lookup(sc.osstat, "osstat").kind != ColumnKind::binary) {
    throw SchemaError("survival status '" + sc.osstat + "' must be binary");
  }
  if (lookup(sc.efsstat, "efsstat").kind != ColumnKind::binary) {
    throw SchemaError("survival status '" + sc.efsstat + "' must be binary");
  }
}

std::vector<std::string> split_record(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted) throw DataError("unterminated quote on line " + std::to_string(line_no));
  fields.push_back(std::move(cur));
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool is_nonfinite_literal(std::string_view s) {
  std::string lower;
  for (char ch : s) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (!lower.empty() && (lower[0] == '+' || lower[0] == '-')) lower.erase(0, 1);
  return lower == "nan" || lower == "inf" || lower == "infinity" || lower == "null";
}

Cell parse_cell(std::string_view raw, const ColumnSchema& col, std::size_t row,
                std::string_view missing_token) {
  if (raw == missing_token) return std::monostate{};
  if (col.kind == ColumnKind::categorical) return std::string(raw);
  const auto text = trim(raw);
  if (is_nonfinite_literal(text)) throw NonFiniteValue(row, col.name, "non-finite value '" + std::string(text) + "'");
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw TypeMismatch(row, col.name, "'" + std::string(raw) + "' is not a " + std::string(to_string(col.kind)));
  }
  if (!std::isfinite(v)) throw NonFiniteValue(row, col.name, "non-finite value");
  if (col.kind == ColumnKind::binary && v != 0.0 && v != 1.0) {
    throw TypeMismatch(row, col.name, "'" + std::string(raw) + "' is not binary (0/1)");
  }
  if (col.kind == ColumnKind::integer && v != std::trunc(v)) {
    throw TypeMismatch(row, col.name, "'" + std::string(raw) + "' is not an integer");
  }
  return v;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

SchemaDocument parse_schema(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("malformed schema document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("columns") || !doc["columns"].is_array()) {
    throw SchemaError("schema document needs a 'columns' array");
  }
  SchemaDocument out;
  try {
    for (const auto& item : doc["columns"]) {
      if (!item.is_object() || !item.contains("name") || !item.contains("kind")) {
        throw SchemaError("column entries need 'name' and 'kind'");
      }
      ColumnSchema col;
      col.name = item.at("name").get<std::string>();
      if (col.name.empty()) throw SchemaError("column name must not be empty");
      col.kind = parse_kind(item.at("kind").get<std::string>());
      if (item.contains("roles")) {
        for (const auto& r : item["roles"]) {
          if (auto role = parse_role(r.get<std::string>()); role && !col.has_role(*role)) {
            col.roles.push_back(*role);
          }
        }
      }
      col.missing_allowed = item.value("missing_allowed", false);
      if (col.has_role(ColumnRole::survival_time) && !col.numeric()) {
        throw SchemaError("survival_time column '" + col.name + "' must be numeric");
      }
      if (col.has_role(ColumnRole::survival_status) && col.kind != ColumnKind::binary) {
        throw SchemaError("survival_status column '" + col.name + "' must be binary");
      }
      for (const auto& prev : out.columns) {
        if (prev.name == col.name) throw SchemaError("duplicate column '" + col.name + "'");
      }
      out.columns.push_back(std::move(col));
    }
    if (doc.contains("survival") && !doc["survival"].is_null()) {
      const auto& s = doc["survival"];
      SurvivalColumns sc;
      sc.ostm = s.at("ostm").get<std::string>();
      sc.efstm = s.at("efstm").get<std::string>();
      sc.osstat = s.at("osstat").get<std::string>();
      sc.efsstat = s.at("efsstat").get<std::string>();
      sc.efstm_dif = s.value("efstm_dif", sc.efstm + "_dif");
      out.survival = sc;
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed schema document: ") + e.what());
  }
  check_survival(out);
  return out;
}

SchemaDocument load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schema file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_schema(buf.str());
}

std::string schema_to_json(const SchemaDocument& doc) {
  json cols = json::array();
  for (const auto& c : doc.columns) {
    json roles = json::array();
    for (auto r : c.roles) roles.push_back(std::string(to_string(r)));
    cols.push_back({{"name", c.name},
                    {"kind", std::string(to_string(c.kind))},
                    {"roles", roles},
                    {"missing_allowed", c.missing_allowed}});
  }
  json out = {{"columns", cols}};
  if (doc.survival) {
    out["survival"] = {{"ostm", doc.survival->ostm},
                       {"efstm", doc.survival->efstm},
                       {"osstat", doc.survival->osstat},
                       {"efsstat", doc.survival->efsstat},
                       {"efstm_dif", doc.survival->efstm_dif}};
  }
  return out.dump(2);
}

Dataset read_csv(std::istream& in, const Schema& schema, std::string_view missing_token) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError("csv input has no header row");
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_record(line, line_no);

  std::map<std::string, std::size_t> schema_pos;
  for (std::size_t c = 0; c < schema.size(); ++c) schema_pos[schema[c].name] = c;
  std::vector<std::size_t> file_to_schema(header.size());
  std::vector<bool> seen(schema.size(), false);
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name(trim(header[i]));
    auto it = schema_pos.find(name);
    if (it == schema_pos.end()) throw DataError("header column '" + name + "' is not in the schema");
    if (seen[it->second]) throw DataError("header repeats column '" + name + "'");
    seen[it->second] = true;
    file_to_schema[i] = it->second;
  }
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (!seen[c]) throw DataError("schema column '" + schema[c].name + "' missing from header");
  }

  Dataset ds(schema);
  std::vector<Cell> cells(schema.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto fields = split_record(line, line_no);
    if (fields.size() != header.size()) {
      throw DataError("row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(header.size()));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto c = file_to_schema[i];
      cells[c] = parse_cell(fields[i], schema[c], row, missing_token);
      if (std::holds_alternative<std::monostate>(cells[c]) && !schema[c].missing_allowed) {
        throw MissingValue(row, schema[c].name);
      }
    }
    ds.add_row(cells);
  }
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema, std::string_view missing_token) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open csv file " + path.string());
  return read_csv(in, schema, missing_token);
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const Dataset& ds, std::string_view missing_token) {
  for (std::size_t c = 0; c < ds.cols(); ++c) {
    if (c) out << ',';
    out << quote_if_needed(ds.column_schema(c).name);
  }
  out << '\n';
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    for (std::size_t c = 0; c < ds.cols(); ++c) {
      if (c) out << ',';
      if (ds.is_missing(r, c)) {
        out << missing_token;
      } else if (ds.column_schema(c).kind == ColumnKind::categorical) {
        out << quote_if_needed(ds.label(r, c));
      } else {
        out << format_number(ds.number(r, c));
      }
    }
    out << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& ds, std::string_view missing_token) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write csv file " + path.string());
  write_csv(out, ds, missing_token);
}

}  // namespace synthcheck
