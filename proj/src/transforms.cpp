#include "synthcheck/transforms.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "synthcheck/error.hpp"
#include "synthcheck/random.hpp"

namespace synthcheck {

namespace {

bool is_recoded(const Dataset& ds, std::size_t c) {
  if (ds.column_schema(c).kind != ColumnKind::categorical) return false;
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    if (ds.is_missing(r, c)) return false;
    const auto& l = ds.label(r, c);
    if (l != "-1" && l != "0" && l != "1") return false;
  }
  return true;
}

}  // namespace

Dataset recode_missing_binary(const Dataset& ds, std::span<const std::string> columns) {
  Dataset out = ds;
  for (const auto& name : columns) {
    const auto c = out.index_of(name);
    const auto& schema = out.column_schema(c);
    if (is_recoded(out, c)) continue;
    if (schema.kind != ColumnKind::binary) {
      throw DataError("column '" + name + "' is not binary; cannot recode missing values");
    }
    std::vector<Cell> values;
    values.reserve(out.rows());
    for (std::size_t r = 0; r < out.rows(); ++r) {
      if (out.is_missing(r, c)) {
        values.emplace_back(std::string("-1"));
      } else {
        values.emplace_back(std::string(out.number(r, c) != 0.0 ? "1" : "0"));
      }
    }
    ColumnSchema recoded = schema;
    recoded.kind = ColumnKind::categorical;
    recoded.missing_allowed = false;
    out.replace_column(c, std::move(recoded), std::move(values));
  }
  return out;
}

Dataset apply_efstm_transform(const Dataset& ds, const SurvivalColumns& sc) {
  const auto os = ds.find(sc.ostm);
  const auto efs = ds.find(sc.efstm);
  if (!os || !efs) throw DataError("survival columns '" + sc.ostm + "'/'" + sc.efstm + "' not found");
  const auto& os_schema = ds.column_schema(*os);
  const auto& efs_schema = ds.column_schema(*efs);
  if (!os_schema.numeric() || !efs_schema.numeric()) {
    throw DataError("survival time columns must be numeric");
  }
  std::vector<Cell> dif;
  dif.reserve(ds.rows());
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    const double v = ds.number(r, *os) - ds.number(r, *efs);
    if (std::isnan(v)) {
      dif.emplace_back(std::monostate{});
    } else {
      dif.emplace_back(v);
    }
  }
  ColumnSchema dif_schema;
  dif_schema.name = sc.efstm_dif;
  dif_schema.kind = (os_schema.kind == ColumnKind::integer && efs_schema.kind == ColumnKind::integer)
                        ? ColumnKind::integer
                        : ColumnKind::floating;
  dif_schema.roles = efs_schema.roles;
  dif_schema.missing_allowed = os_schema.missing_allowed || efs_schema.missing_allowed;
  Dataset out = ds;
  out.replace_column(*efs, std::move(dif_schema), std::move(dif));
  return out;
}

Dataset invert_efstm_transform(const Dataset& ds, const SurvivalColumns& sc) {
  const auto os = ds.find(sc.ostm);
  const auto dif = ds.find(sc.efstm_dif);
  if (!dif) throw DataError("column '" + sc.efstm_dif + "' not found");
  if (!os) throw DataError("column '" + sc.ostm + "' not found");
  std::vector<Cell> efs;
  efs.reserve(ds.rows());
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    const double v = ds.number(r, *os) - ds.number(r, *dif);
    if (std::isnan(v)) {
      efs.emplace_back(std::monostate{});
    } else {
      efs.emplace_back(v);
    }
  }
  const auto& dif_schema = ds.column_schema(*dif);
  ColumnSchema efs_schema;
  efs_schema.name = sc.efstm;
  efs_schema.kind = (dif_schema.kind == ColumnKind::integer &&
                     ds.column_schema(*os).kind == ColumnKind::integer)
                        ? ColumnKind::integer
                        : ColumnKind::floating;
  efs_schema.roles = dif_schema.roles;
  efs_schema.missing_allowed = dif_schema.missing_allowed;
  Dataset out = ds;
  out.replace_column(*dif, std::move(efs_schema), std::move(efs));
  return out;
}

std::vector<std::size_t> strata_ids(const Dataset& ds, std::span<const std::string> key) {
  std::vector<std::size_t> cols;
  for (const auto& name : key) {
    const auto c = ds.find(name);
    if (!c) throw DataError("stratum key references missing column '" + name + "'");
    cols.push_back(*c);
  }
  std::map<std::string, std::size_t> ids;
  std::vector<std::size_t> out(ds.rows());
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    std::string k;
    for (auto c : cols) {
      auto cat = ds.category(r, c);
      k += cat ? *cat : std::string("\x01");
      k += '\x1f';
    }
    auto [it, inserted] = ids.emplace(k, ids.size());
    out[r] = it->second;
  }
  return out;
}

namespace {

std::vector<std::vector<std::size_t>> group_by_stratum(const std::vector<std::size_t>& ids) {
  std::size_t n = 0;
  for (auto id : ids) n = std::max(n, id + 1);
  std::vector<std::vector<std::size_t>> groups(n);
  for (std::size_t r = 0; r < ids.size(); ++r) groups[ids[r]].push_back(r);
  return groups;
}

}  // namespace

SplitResult stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  const auto key = binary_outcome_columns(ds.schema());
  return stratified_split(ds, test_fraction, seed, key);
}

SplitResult stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed,
                             std::span<const std::string> key) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DataError("test fraction must lie strictly between 0 and 1");
  }
  const auto groups = group_by_stratum(strata_ids(ds, key));
  Rng rng(seed);
  std::vector<bool> is_test(ds.rows(), false);
  for (auto members : groups) {
    if (members.size() < 2) continue;
    rng.shuffle(members.begin(), members.end());
    const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(members.size()) * test_fraction));
    for (std::size_t i = 0; i < n_test && i < members.size(); ++i) is_test[members[i]] = true;
  }
  SplitResult out;
  out.strata_key.assign(key.begin(), key.end());
  for (std::size_t r = 0; r < ds.rows(); ++r) (is_test[r] ? out.test_rows : out.train_rows).push_back(r);
  out.train = ds.select_rows(out.train_rows);
  out.test = ds.select_rows(out.test_rows);
  return out;
}

std::vector<std::size_t> fold_assignment(const Dataset& ds, std::size_t k, std::uint64_t seed,
                                         std::span<const std::string> key) {
  if (k < 2) throw DataError("k-fold needs k >= 2");
  if (k > ds.rows()) {
    throw DataError("k-fold with k=" + std::to_string(k) + " exceeds row count " + std::to_string(ds.rows()));
  }
  auto groups = group_by_stratum(strata_ids(ds, key));
  Rng rng(seed);
  std::vector<std::size_t> fold(ds.rows());
  std::size_t position = 0;
  for (auto& members : groups) {
    rng.shuffle(members.begin(), members.end());
    for (auto r : members) fold[r] = position++ % k;
  }
  return fold;
}

std::vector<Fold> kfold(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  const auto key = binary_outcome_columns(ds.schema());
  return kfold(ds, k, seed, key);
}

std::vector<Fold> kfold(const Dataset& ds, std::size_t k, std::uint64_t seed,
                        std::span<const std::string> key) {
  const auto assignment = fold_assignment(ds, k, seed, key);
  std::vector<Fold> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train_rows;
    for (std::size_t r = 0; r < ds.rows(); ++r) {
      (assignment[r] == f ? folds[f].holdout_rows : train_rows).push_back(r);
    }
    folds[f].train = ds.select_rows(train_rows);
    folds[f].holdout = ds.select_rows(folds[f].holdout_rows);
  }
  return folds;
}

}  // namespace synthcheck
