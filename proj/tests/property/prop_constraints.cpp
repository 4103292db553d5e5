#include <catch_amalgamated.hpp>

#include "synthcheck/constraints.hpp"
#include "synthcheck/random.hpp"
#include "test_support.hpp"

using namespace synthcheck;
using namespace testing_support;

namespace {

const SurvivalColumns kSc{"OSTM", "EFSTM", "OSSTAT", "EFSSTAT", "EFSTM_dif"};

Cell maybe_missing(Rng& rng, double v) { return rng.bernoulli(0.05) ? Cell{std::monostate{}} : Cell{v}; }

Dataset messy(Rng& rng, std::size_t n) {
  std::vector<Cell> os, efs, oss, efss, age;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = std::round(rng.uniform(-20, 200));
    const double u = rng.uniform();
    const double e = u < 0.3 ? t : u < 0.4 ? std::round(t * 0.97) : std::round(rng.uniform(-20, 220));
    os.push_back(maybe_missing(rng, t));
    efs.push_back(maybe_missing(rng, e));
    oss.push_back(maybe_missing(rng, rng.bernoulli(0.5) ? 1.0 : 0.0));
    efss.push_back(maybe_missing(rng, rng.bernoulli(0.5) ? 1.0 : 0.0));
    age.push_back(std::round(rng.uniform(-5, 80)));
  }
  return make_dataset({{num_col("OSTM"), os},
                       {num_col("EFSTM"), efs},
                       {bin_col("OSSTAT"), oss},
                       {bin_col("EFSSTAT"), efss},
                       {num_col("age"), age}});
}

}  // namespace

TEST_CASE("constraint report invariants", "[constraints][property]") {
  Rng rng(GENERATE(1u, 2u, 3u, 4u, 5u, 6u));
  const auto ds = messy(rng, 1 + rng.index(400));
  const auto rep = validate(ds, kSc, {"age"});
  const auto rate = [&](Rule r) { return rep.rate(r); };

  REQUIRE(rate(Rule::V4) <= rate(Rule::V1) + rate(Rule::V2) + rate(Rule::V3) + 1e-12);
  REQUIRE(rate(Rule::V4) >= std::max({rate(Rule::V1), rate(Rule::V2), rate(Rule::V3)}));
  REQUIRE(rate(Rule::V7) >= std::max({rate(Rule::V4), rate(Rule::V5), rate(Rule::V6)}));

  const auto match = match_ratios(ds, kSc, rng.uniform(0.5, 1.0));
  REQUIRE(match.relaxed >= match.exact - 1e-12);

  const auto kept = remove_invalid(ds, rep);
  REQUIRE(kept.data.rows() <= ds.rows());
  REQUIRE(kept.data.rows() + kept.removed == ds.rows());
  const auto again = validate(kept.data, kSc, {"age"});
  REQUIRE(again.counts[static_cast<std::size_t>(Rule::V7)] == 0);
  REQUIRE(remove_invalid(kept.data, again).data == kept.data);
}

TEST_CASE("relaxed matches never violate V3", "[constraints][property]") {
  Rng rng(GENERATE(9u, 10u));
  const auto ds = messy(rng, 300);
  const auto rep = validate(ds, kSc, {});
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    const double os = ds.number(r, 0), efs = ds.number(r, 1);
    if (os > 0 && efs >= 0.95 * os && efs <= os) REQUIRE_FALSE(rep.violates(r, Rule::V3));
  }
}
