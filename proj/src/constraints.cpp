#include "synthcheck/constraints.hpp"

#include <algorithm>
#include <cmath>

#include "synthcheck/error.hpp"

namespace synthcheck {

namespace {

constexpr ViolationMask bit(Rule rule) { return static_cast<ViolationMask>(1u << static_cast<unsigned>(rule)); }

struct SurvivalIndex {
  std::size_t ostm, efstm, osstat, efsstat;
};

SurvivalIndex locate(const Dataset& ds, const SurvivalColumns& sc) {
  return {ds.index_of(sc.ostm), ds.index_of(sc.efstm), ds.index_of(sc.osstat), ds.index_of(sc.efsstat)};
}

}  // namespace

const char* rule_name(Rule rule) noexcept {
  static constexpr const char* names[] = {"V1", "V2", "V3", "V4", "V5", "V6", "V7"};
  return names[static_cast<std::size_t>(rule)];
}

ConstraintConfig ConstraintConfig::from_json(const nlohmann::json& doc) {
  ConstraintConfig cfg;
  try {
    const auto& s = doc.at("survival");
    cfg.survival.ostm = s.at("ostm").get<std::string>();
    cfg.survival.efstm = s.at("efstm").get<std::string>();
    cfg.survival.osstat = s.at("osstat").get<std::string>();
    cfg.survival.efsstat = s.at("efsstat").get<std::string>();
    cfg.survival.efstm_dif = s.value("efstm_dif", cfg.survival.efstm + "_dif");
    cfg.nonnegative = doc.value("nonnegative", std::vector<std::string>{});
    cfg.relaxed_tolerance = doc.value("relaxed_tolerance", 0.95);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed constraint config: ") + e.what());
  }
  if (!(cfg.relaxed_tolerance > 0.0 && cfg.relaxed_tolerance <= 1.0)) {
    throw ConfigError("relaxed_tolerance must lie in (0, 1]");
  }
  return cfg;
}

nlohmann::json ConstraintConfig::to_json() const {
  return {{"survival",
           {{"ostm", survival.ostm},
            {"efstm", survival.efstm},
            {"osstat", survival.osstat},
            {"efsstat", survival.efsstat},
            {"efstm_dif", survival.efstm_dif}}},
          {"nonnegative", nonnegative},
          {"relaxed_tolerance", relaxed_tolerance}};
}

double ConstraintReport::rate(Rule rule) const {
  if (rows == 0) return 0.0;
  return static_cast<double>(counts[static_cast<std::size_t>(rule)]) / static_cast<double>(rows);
}

bool ConstraintReport::violates(std::size_t row, Rule rule) const { return (row_mask.at(row) & bit(rule)) != 0; }

nlohmann::json ConstraintReport::to_json() const {
  nlohmann::json rates = nlohmann::json::object();
  nlohmann::json count = nlohmann::json::object();
  for (std::size_t i = 0; i < rule_count; ++i) {
    const auto r = static_cast<Rule>(i);
    rates[rule_name(r)] = rate(r);
    count[rule_name(r)] = counts[i];
  }
  return {{"rows", rows}, {"rates", rates}, {"counts", count}};
}

ConstraintReport validate(const Dataset& ds, const SurvivalColumns& sc, const std::vector<std::string>& nonnegative) {
  const auto idx = locate(ds, sc);
  std::vector<std::size_t> nonneg;
  for (const auto& name : nonnegative) {
    if (name == sc.ostm || name == sc.efstm) {
      throw DataError("'" + name + "' has its own constraints and cannot be listed as nonnegative");
    }
    const auto c = ds.index_of(name);
    if (!ds.column_schema(c).numeric() && ds.column_schema(c).kind != ColumnKind::binary) {
      throw DataError("nonnegative column '" + name + "' is not numeric");
    }
    nonneg.push_back(c);
  }

  ConstraintReport report;
  report.rows = ds.rows();
  report.row_mask.assign(ds.rows(), 0);
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    const double os = ds.number(r, idx.ostm);
    const double efs = ds.number(r, idx.efstm);
    const double os_stat = ds.number(r, idx.osstat);
    const double efs_stat = ds.number(r, idx.efsstat);
    const bool times_known = !std::isnan(os) && !std::isnan(efs);

    ViolationMask m = 0;
    if (!(os > 0.0)) m |= bit(Rule::V1);
    if (!(efs > 0.0)) m |= bit(Rule::V2);
    if (!(os >= efs)) m |= bit(Rule::V3);
    if (m & (bit(Rule::V1) | bit(Rule::V2) | bit(Rule::V3))) m |= bit(Rule::V4);
    if (!times_known || (os == efs && (std::isnan(os_stat) || std::isnan(efs_stat) || os_stat != efs_stat))) {
      m |= bit(Rule::V5);
    }
    for (auto c : nonneg) {
      if (ds.number(r, c) < 0.0) {
        m |= bit(Rule::V6);
        break;
      }
    }
    if (m & (bit(Rule::V4) | bit(Rule::V5) | bit(Rule::V6))) m |= bit(Rule::V7);
    report.row_mask[r] = m;
    for (std::size_t i = 0; i < rule_count; ++i) {
      if (m & (1u << i)) ++report.counts[i];
    }
  }
  return report;
}

MatchRatioReport match_ratios(const Dataset& ds, const SurvivalColumns& sc, double tolerance) {
  if (!(tolerance > 0.0 && tolerance <= 1.0)) throw ConfigError("match tolerance must lie in (0, 1]");
  const auto idx = locate(ds, sc);
  MatchRatioReport out;
  out.tolerance = tolerance;
  if (ds.empty()) return out;
  std::size_t exact = 0;
  std::size_t relaxed = 0;
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    const double os = ds.number(r, idx.ostm);
    const double efs = ds.number(r, idx.efstm);
    if (os == efs) ++exact;
    if (os > 0.0 && efs >= tolerance * os && efs <= os) ++relaxed;
  }
  out.exact = static_cast<double>(exact) / static_cast<double>(ds.rows());
  out.relaxed = static_cast<double>(relaxed) / static_cast<double>(ds.rows());
  return out;
}

RemovalResult remove_invalid(const Dataset& ds, const ConstraintReport& report) {
  if (report.rows != ds.rows() || report.row_mask.size() != ds.rows()) {
    throw DataError("constraint report covers " + std::to_string(report.rows) + " rows but the dataset has " +
                    std::to_string(ds.rows()));
  }
  std::vector<std::size_t> keep;
  keep.reserve(ds.rows());
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    if (report.valid(r)) keep.push_back(r);
  }
  return {keep.size() == ds.rows() ? ds : ds.select_rows(keep), ds.rows() - keep.size()};
}

std::size_t snap_relaxed_matches(Dataset& ds, const SurvivalColumns& sc, double tolerance) {
  const auto idx = locate(ds, sc);
  std::size_t changed = 0;
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    const double os = ds.number(r, idx.ostm);
    const double efs = ds.number(r, idx.efstm);
    if (os > 0.0 && efs >= tolerance * os && efs < os) {
      ds.set_number(r, idx.efstm, os);
      ds.set_number(r, idx.efsstat, ds.number(r, idx.osstat));
      ++changed;
    }
  }
  return changed;
}

}  // namespace synthcheck
