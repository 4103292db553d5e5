#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "synthcheck/dataset.hpp"

namespace synthcheck {

enum class Rule : std::uint8_t { V1, V2, V3, V4, V5, V6, V7 };

inline constexpr std::size_t rule_count = 7;
const char* rule_name(Rule rule) noexcept;

/// Bit i set when the row violates rule V(i+1).
using ViolationMask = std::uint8_t;

struct ConstraintConfig {
  SurvivalColumns survival;
  std::vector<std::string> nonnegative;
  double relaxed_tolerance = 0.95;

  static ConstraintConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

struct ConstraintReport {
  std::size_t rows = 0;
  std::array<std::size_t, rule_count> counts{};
  std::vector<ViolationMask> row_mask;

  double rate(Rule rule) const;
  bool violates(std::size_t row, Rule rule) const;
  bool valid(std::size_t row) const { return !violates(row, Rule::V7); }
  nlohmann::json to_json() const;
};

struct MatchRatioReport {
  double exact = 0.0;
  double relaxed = 0.0;
  double tolerance = 0.95;
};

/// Row-level V1..V7 evaluation. Missing survival cells fail every rule that
/// reads them. Throws DataError for absent columns or when nonnegative lists
/// a survival time column.
ConstraintReport validate(const Dataset& ds, const SurvivalColumns& sc, const std::vector<std::string>& nonnegative);

MatchRatioReport match_ratios(const Dataset& ds, const SurvivalColumns& sc, double tolerance = 0.95);

struct RemovalResult {
  Dataset data;
  std::size_t removed = 0;
};

/// Drops rows that fail V7, keeping survivor order.
RemovalResult remove_invalid(const Dataset& ds, const ConstraintReport& report);

/// Optional repair: rows in the relaxed band get EFSTM = OSTM (and EFSSTAT =
/// OSSTAT). Returns the number of rows changed.
std::size_t snap_relaxed_matches(Dataset& ds, const SurvivalColumns& sc, double tolerance = 0.95);

}  // namespace synthcheck
