#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace synthcheck {

/// v rounded to the given number of significant digits (printf %.*g, then
/// parsed back).
double round_significant(double v, int digits = 6);

/// Copy with every float rounded to 6 significant digits and non-finite
/// floats replaced by null. Object keys are already sorted by nlohmann::json.
nlohmann::json canonical_json(const nlohmann::json& doc);

/// Canonical form, 2-space indent, trailing newline.
std::string dump_report(const nlohmann::json& doc);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_report(const std::filesystem::path& path, const nlohmann::json& doc);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace synthcheck
