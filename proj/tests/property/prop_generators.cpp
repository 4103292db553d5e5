#include <catch_amalgamated.hpp>

#include <cmath>

#include "synthcheck/fixtures.hpp"
#include "synthcheck/generators.hpp"
#include "synthcheck/predictive.hpp"
#include "synthcheck/random.hpp"

using namespace synthcheck;

TEST_CASE("clamp keeps values in the real range and is idempotent", "[generators][property]") {
  const auto seed = GENERATE(1u, 2u, 3u);
  const auto real = actg_like_fixture({120, seed, 0.6}).data;
  CopulaGenerator gen;
  const auto raw = gen.fit_sample(real, {{"jitter", 2.0}}, 150, seed, 0);
  const auto out = clamp_postprocess(raw, real);
  for (std::size_t c = 0; c < real.cols(); ++c) {
    if (!real.column_schema(c).numeric()) continue;
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t r = 0; r < real.rows(); ++r) {
      lo = std::min(lo, real.number(r, c));
      hi = std::max(hi, real.number(r, c));
    }
    for (std::size_t r = 0; r < out.rows(); ++r) {
      REQUIRE(out.number(r, c) >= lo);
      REQUIRE(out.number(r, c) <= hi);
    }
  }
  REQUIRE(clamp_postprocess(out, real) == out);
}

TEST_CASE("copula samples keep the schema and observed categories", "[generators][property]") {
  const auto seed = GENERATE(4u, 5u);
  const auto real = actg_like_fixture({150, seed, 0.6}).data;
  Rng rng(seed);
  CopulaParams p;
  p.correlation_shrinkage = rng.uniform();
  p.marginal_bins = 2 + rng.index(60);
  p.jitter = rng.uniform(0, 0.5);
  p.category_smoothing = rng.uniform(0, 5);
  const auto syn = CopulaModel::fit(real, p).sample(100, seed);
  check_generator_output(syn, real.schema(), 100);
  for (std::size_t c = 0; c < real.cols(); ++c) {
    if (real.column_schema(c).kind != ColumnKind::categorical) continue;
    std::set<std::string> seen;
    for (std::size_t r = 0; r < real.rows(); ++r) seen.insert(*real.category(r, c));
    for (std::size_t r = 0; r < syn.rows(); ++r) REQUIRE(seen.count(*syn.category(r, c)) == 1);
  }
}

TEST_CASE("MCC is invariant to flipping both label vectors", "[predictive][property]") {
  Rng rng(GENERATE(7u, 8u, 9u));
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + rng.index(40);
    std::vector<int> t(n), p(n), tf(n), pf(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = rng.bernoulli(0.5);
      p[i] = rng.bernoulli(0.5);
      tf[i] = 1 - t[i];
      pf[i] = 1 - p[i];
    }
    const double m = mcc(t, p);
    REQUIRE(m >= -1.0);
    REQUIRE(m <= 1.0);
    REQUIRE(mcc(tf, pf) == Catch::Approx(m).margin(1e-12));
    const bool both = std::count(t.begin(), t.end(), 1) > 0 && std::count(t.begin(), t.end(), 0) > 0;
    if (both) REQUIRE(mcc(t, t) == Catch::Approx(1.0));
  }
}
