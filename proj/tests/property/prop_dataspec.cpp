#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <set>

#include "synthcheck/fixtures.hpp"
#include "synthcheck/random.hpp"
#include "synthcheck/transforms.hpp"
#include "test_support.hpp"

using namespace synthcheck;
using namespace testing_support;

namespace {

const SurvivalColumns kSc{"OSTM", "EFSTM", "OSSTAT", "EFSSTAT", "EFSTM_dif"};

Dataset random_survival(Rng& rng, std::size_t n) {
  std::vector<Cell> os, efs, oss, efss, x;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = std::round(rng.uniform(1, 1000));
    os.push_back(t);
    efs.push_back(rng.bernoulli(0.1) ? Cell{std::monostate{}} : Cell{std::round(rng.uniform(0, t))});
    oss.push_back(rng.bernoulli(0.5) ? 1.0 : 0.0);
    efss.push_back(rng.bernoulli(0.1) ? Cell{std::monostate{}} : Cell{rng.bernoulli(0.5) ? 1.0 : 0.0});
    x.push_back(rng.normal());
  }
  return make_dataset({{num_col("OSTM", ColumnKind::integer, {ColumnRole::survival_time}), os},
                       {num_col("EFSTM", ColumnKind::integer, {ColumnRole::survival_time}), efs},
                       {bin_col("OSSTAT", {ColumnRole::outcome}), oss},
                       {bin_col("EFSSTAT", {ColumnRole::outcome}), efss},
                       {num_col("x"), x}});
}

}  // namespace

TEST_CASE("EFSTM transform round-trips", "[dataspec][property]") {
  Rng rng(GENERATE(1u, 2u, 3u, 4u, 5u));
  const auto ds = random_survival(rng, 1 + rng.index(200));
  const auto back = invert_efstm_transform(apply_efstm_transform(ds, kSc), kSc);
  REQUIRE(back == ds);
}

TEST_CASE("stratified split partitions the rows", "[dataspec][property]") {
  Rng rng(GENERATE(11u, 12u, 13u, 14u));
  const auto ds = random_survival(rng, 2 + rng.index(300));
  const double frac = rng.uniform(0.05, 0.5);
  const auto parts = stratified_split(ds, frac, rng.next());
  std::vector<std::size_t> all = parts.train_rows;
  all.insert(all.end(), parts.test_rows.begin(), parts.test_rows.end());
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> expected(ds.rows());
  std::iota(expected.begin(), expected.end(), std::size_t{0});
  REQUIRE(all == expected);
  REQUIRE(parts.train.rows() == parts.train_rows.size());
  REQUIRE(std::is_sorted(parts.test_rows.begin(), parts.test_rows.end()));
}

TEST_CASE("kfold holdouts partition the rows with balanced sizes", "[dataspec][property]") {
  Rng rng(GENERATE(21u, 22u, 23u));
  const auto ds = random_survival(rng, 20 + rng.index(300));
  const std::size_t k = 2 + rng.index(6);
  const auto folds = kfold(ds, k, rng.next());
  REQUIRE(folds.size() == k);
  std::vector<std::size_t> seen;
  std::size_t lo = ds.rows(), hi = 0;
  for (const auto& f : folds) {
    seen.insert(seen.end(), f.holdout_rows.begin(), f.holdout_rows.end());
    lo = std::min(lo, f.holdout.rows());
    hi = std::max(hi, f.holdout.rows());
    REQUIRE(f.train.rows() + f.holdout.rows() == ds.rows());
  }
  std::sort(seen.begin(), seen.end());
  REQUIRE(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
  REQUIRE(seen.size() == ds.rows());
  REQUIRE(hi - lo <= 1);
}

TEST_CASE("binary recoding is idempotent", "[dataspec][property]") {
  Rng rng(GENERATE(31u, 32u));
  const auto ds = random_survival(rng, 50);
  const std::vector<std::string> cols{"EFSSTAT"};
  const auto once = recode_missing_binary(ds, cols);
  REQUIRE(recode_missing_binary(once, cols) == once);
}
