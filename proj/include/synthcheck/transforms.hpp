#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "synthcheck/dataset.hpp"

namespace synthcheck {

/// Maps binary-with-missing columns to {1, 0, -1}, -1 standing for a missing
/// value. The columns become categorical with support {-1, 0, 1}. Columns that
/// were already recoded pass through unchanged.
Dataset recode_missing_binary(const Dataset& ds, std::span<const std::string> columns);

/// Replaces EFSTM by EFSTM_dif = OSTM - EFSTM (same column position).
Dataset apply_efstm_transform(const Dataset& ds, const SurvivalColumns& sc);

/// Restores EFSTM = OSTM - EFSTM_dif and drops EFSTM_dif.
Dataset invert_efstm_transform(const Dataset& ds, const SurvivalColumns& sc);

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<std::string> strata_key;
  std::vector<std::size_t> train_rows;  // source row indices, ascending
  std::vector<std::size_t> test_rows;
};

/// Stratum id per row over the given binary key columns (missing is its own
/// level). Ids are dense and ordered by first appearance.
std::vector<std::size_t> strata_ids(const Dataset& ds, std::span<const std::string> key);

/// Per stratum, round(size * test_fraction) rows go to test; strata with
/// fewer than two rows stay in train. key defaults to the binary outcome
/// columns of the schema.
SplitResult stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed);
SplitResult stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed,
                             std::span<const std::string> key);

struct Fold {
  Dataset train;
  Dataset holdout;
  std::vector<std::size_t> holdout_rows;
};

/// Fold index per row. Rows are shuffled within strata, strata are laid end to
/// end and dealt round-robin, so fold sizes differ by at most one (the extra
/// rows go to the first folds) and each stratum is spread evenly.
std::vector<std::size_t> fold_assignment(const Dataset& ds, std::size_t k, std::uint64_t seed,
                                         std::span<const std::string> key);

std::vector<Fold> kfold(const Dataset& ds, std::size_t k, std::uint64_t seed);
std::vector<Fold> kfold(const Dataset& ds, std::size_t k, std::uint64_t seed,
                        std::span<const std::string> key);

}  // namespace synthcheck
