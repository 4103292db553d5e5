#include "synthcheck/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "synthcheck/error.hpp"

namespace synthcheck {

double round_significant(double v, int digits) {
  if (!std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // no negative zero
}

nlohmann::json canonical_json(const nlohmann::json& doc) {
  switch (doc.type()) {
    case nlohmann::json::value_t::object: {
      nlohmann::json out = nlohmann::json::object();
      for (const auto& [k, v] : doc.items()) out[k] = canonical_json(v);
      return out;
    }
    case nlohmann::json::value_t::array: {
      nlohmann::json out = nlohmann::json::array();
      for (const auto& v : doc) out.push_back(canonical_json(v));
      return out;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = doc.get<double>();
      if (!std::isfinite(v)) return nullptr;
      return round_significant(v);
    }
    default:
      return doc;
  }
}

std::string dump_report(const nlohmann::json& doc) { return canonical_json(doc).dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("error writing " + path.string());
}

void write_report(const std::filesystem::path& path, const nlohmann::json& doc) { write_text(path, dump_report(doc)); }

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace synthcheck
