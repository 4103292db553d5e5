#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "synthcheck/association.hpp"
#include "synthcheck/error.hpp"
#include "synthcheck/fixtures.hpp"
#include "synthcheck/metrics.hpp"
#include "synthcheck/random.hpp"
#include "test_support.hpp"

using namespace synthcheck;
using namespace testing_support;

namespace {

// Oracle: sample statistics computed directly.
struct Stats {
  double mean, median, sd;
};

Stats stats_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  const double median = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, median, std::sqrt(ss / (n - 1.0))};
}

std::vector<std::optional<std::string>> cats(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

std::vector<Cell> repeat_labels(const std::vector<std::pair<std::string, int>>& spec) {
  std::vector<Cell> out;
  for (const auto& [label, count] : spec) {
    for (int i = 0; i < count; ++i) out.emplace_back(label);
  }
  return out;
}

}  // namespace

TEST(BasicStatistical, IdentityIsOne) {
  const auto fx = actg_like_fixture({300, 1, 0.6});
  EXPECT_DOUBLE_EQ(basic_statistical_measure(fx.data, fx.data), 1.0);
}

TEST(BasicStatistical, MeanShiftOnly) {
  // Real has mean 10 and median 10; syn keeps the median and sd but has
  // mean 9, so only the mean contributes an error of 0.1.
  const std::vector<double> real = {8, 10, 12, 10, 10};
  const auto r = stats_of(real);
  ASSERT_DOUBLE_EQ(r.mean, 10.0);
  ASSERT_DOUBLE_EQ(r.median, 10.0);
  // syn = {a, 10, 10, 10, 15 - a}: mean 9; pick a so the sum of squares
  // about 9 matches real's, i.e. (a-9)^2 + (6-a)^2 + 3 = 4 sd^2.
  const double s = r.sd * r.sd * 4.0 - 3.0;
  const double disc = 4.0 * 225.0 - 8.0 * (117.0 - s);
  const double a = (30.0 - std::sqrt(disc)) / 4.0;
  const std::vector<double> syn = {a, 10, 10, 10, 15.0 - a};
  const auto s_stats = stats_of(syn);
  ASSERT_NEAR(s_stats.mean, 9.0, 1e-12);
  ASSERT_NEAR(s_stats.median, 10.0, 1e-12);
  ASSERT_NEAR(s_stats.sd, r.sd, 1e-12);
  const auto dr = make_dataset({{num_col("x"), numbers(real)}});
  const auto ds = make_dataset({{num_col("x"), numbers(syn)}});
  EXPECT_NEAR(basic_statistical_measure(dr, ds), 1.0 - 0.1 / 3.0, 1e-9);
}

TEST(BasicStatistical, CappedRelativeError) {
  // mean 25 vs 10 is a relative error of 1.5, capped at 1.
  const std::vector<double> real = {8, 10, 12};
  const std::vector<double> syn = {8, 10, 57};
  const auto sr = stats_of(real), ss = stats_of(syn);
  const double expected =
      1.0 - (std::min(1.0, std::abs(ss.mean - sr.mean) / sr.mean) + 0.0 + std::min(1.0, std::abs(ss.sd - sr.sd) / sr.sd)) / 3.0;
  const auto dr = make_dataset({{num_col("x"), numbers(real)}});
  const auto ds = make_dataset({{num_col("x"), numbers(syn)}});
  EXPECT_NEAR(basic_statistical_measure(dr, ds), expected, 1e-9);
}

TEST(BasicStatistical, NoNumericColumnsRejected) {
  const auto ds = make_dataset({{cat_col("c"), labels({"a", "b"})}});
  EXPECT_THROW(basic_statistical_measure(ds, ds), MetricError);
}

TEST(SupportCoverage, IdentityIsOne) {
  const auto fx = actg_like_fixture({300, 1, 0.6});
  EXPECT_DOUBLE_EQ(regularized_support_coverage(fx.data, fx.data), 1.0);
}

TEST(SupportCoverage, MissingCategory) {
  const auto real = make_dataset({{cat_col("c"), repeat_labels({{"A", 9}, {"B", 1}})}});
  const auto syn = make_dataset({{cat_col("c"), repeat_labels({{"A", 10}})}});
  EXPECT_NEAR(regularized_support_coverage(real, syn), 0.5, 1e-9);
}

TEST(SupportCoverage, PartialCoverage) {
  const auto real = make_dataset({{cat_col("c"), repeat_labels({{"A", 9}, {"B", 1}})}});
  const auto syn = make_dataset({{cat_col("c"), repeat_labels({{"A", 8}, {"B", 2}})}});
  EXPECT_NEAR(regularized_support_coverage(real, syn), (0.8 / 0.9 + 1.0) / 2.0, 1e-9);
}

TEST(SupportCoverage, NumericBinsClipOutOfRange) {
  // Real spans [0, 10) over ten bins, one value per bin. Synthetic values
  // beyond the range fall into the edge bins.
  std::vector<double> real(10), syn(10);
  for (int i = 0; i < 10; ++i) real[i] = i;
  for (int i = 0; i < 10; ++i) syn[i] = i < 5 ? -100.0 : 100.0;
  const auto dr = make_dataset({{num_col("x"), numbers(real)}});
  const auto ds = make_dataset({{num_col("x"), numbers(syn)}});
  // Edge bins each get 0.5 of syn mass -> capped at 1; others 0.
  EXPECT_NEAR(regularized_support_coverage(dr, ds, 10), 2.0 / 10.0, 1e-9);
}

TEST(SupportCoverage, EmptyRealRejected) {
  const Schema schema = {num_col("x")};
  const Dataset empty(schema);
  const auto syn = make_dataset({{num_col("x"), numbers({1})}});
  EXPECT_THROW(regularized_support_coverage(empty, syn), MetricError);
}

TEST(Association, PearsonExamples) {
  const std::vector<double> x = {1, 2, 3, 4};
  const std::vector<double> y = {2, 1, 4, 3};
  const std::vector<double> neg = {-1, -2, -3, -4};
  EXPECT_NEAR(pearson_corr(x, y), 0.6, 1e-12);
  EXPECT_NEAR(pearson_corr(x, x), 1.0, 1e-12);
  EXPECT_NEAR(pearson_corr(x, neg), -1.0, 1e-12);
  const std::vector<double> constant = {5, 5, 5, 5};
  EXPECT_EQ(pearson_corr(x, constant), 0.0);
}

TEST(Association, PearsonNeedsTwoPairs) {
  const std::vector<double> x = {1, NAN};
  const std::vector<double> y = {1, 2};
  EXPECT_THROW(pearson_corr(x, y), MetricError);
}

TEST(Association, CorrelationRatioExamples) {
  const auto g = cats({"g1", "g1", "g2", "g2"});
  const std::vector<double> v = {1, 2, 3, 4};
  EXPECT_NEAR(correlation_ratio(g, v), std::sqrt(4.0 / 5.0), 1e-12);
  const std::vector<double> equal_means = {1, 3, 2, 2};
  EXPECT_NEAR(correlation_ratio(g, equal_means), 0.0, 1e-12);
  const std::vector<double> constant_groups = {1, 1, 7, 7};
  EXPECT_NEAR(correlation_ratio(g, constant_groups), 1.0, 1e-12);
}

TEST(Association, TheilsUExamples) {
  const auto x = cats({"a", "a", "b", "b"});
  const auto y = cats({"p", "p", "p", "q"});
  // Oracle: H(X) = ln 2; H(X|Y) = 3/4 * H(2/3, 1/3) (natural log).
  const double hx = std::log(2.0);
  const double h_cond = 0.75 * -(2.0 / 3.0 * std::log(2.0 / 3.0) + 1.0 / 3.0 * std::log(1.0 / 3.0));
  EXPECT_NEAR(theils_u(x, y), (hx - h_cond) / hx, 1e-12);
  EXPECT_NEAR(theils_u(x, y), 0.3113, 5e-5);
  EXPECT_NEAR(theils_u(x, x), 1.0, 1e-12);
}

TEST(Association, TheilsUIndependentAndAsymmetric) {
  const auto x = cats({"a", "a", "b", "b"});
  const auto y = cats({"p", "q", "p", "q"});
  EXPECT_NEAR(theils_u(x, y), 0.0, 1e-12);
  // 2x3 table: X in {a,b}, Y in {p,q,r}.
  const auto x2 = cats({"a", "a", "a", "b", "b", "b"});
  const auto y2 = cats({"p", "p", "q", "q", "r", "r"});
  EXPECT_GT(std::abs(theils_u(x2, y2) - theils_u(y2, x2)), 1e-3);
}

TEST(LogCorrelation, PairScoreExamples) {
  EXPECT_NEAR(log_correlation_pair_score(1.0, 0.0), 0.0, 1e-12);
  EXPECT_NEAR(log_correlation_pair_score(0.5, 0.3),
              1.0 - std::abs(std::log(1.5) - std::log(1.3)) / std::log(2.0), 1e-12);
  EXPECT_NEAR(log_correlation_pair_score(0.5, 0.3), 0.7935, 5e-5);
  EXPECT_DOUBLE_EQ(log_correlation_pair_score(0.4, 0.4), 1.0);
}

TEST(LogCorrelation, IdentityAndSingleColumn) {
  const auto fx = actg_like_fixture({300, 1, 0.6});
  EXPECT_DOUBLE_EQ(log_correlation_score(fx.data, fx.data), 1.0);
  const auto one = make_dataset({{num_col("x"), numbers({1, 2, 3})}});
  EXPECT_THROW(log_correlation_score(one, one), MetricError);
}

TEST(LogCorrelation, TwoColumnDatasetMatchesPairScore) {
  const std::vector<double> x = {1, 2, 3, 4};
  const auto real = make_dataset({{num_col("x"), numbers(x)}, {num_col("y"), numbers({2, 1, 4, 3})}});
  const auto syn = make_dataset({{num_col("x"), numbers(x)}, {num_col("y"), numbers({1, 2, 3, 4})}});
  EXPECT_NEAR(log_correlation_score(real, syn), log_correlation_pair_score(0.6, 1.0), 1e-12);
}

TEST(Spmse, ScoreFormula) {
  EXPECT_DOUBLE_EQ(spmse_score(1.2, 1.0, 1.2), 1.0);
  EXPECT_DOUBLE_EQ(spmse_score(0.5, 1.0, 1.2), 1.0);
  EXPECT_NEAR(spmse_score(2.4, 1.0, 1.2), 0.5, 1e-12);
}

TEST(Spmse, PerfectSeparationApproachesQuarter) {
  // One numeric column, real all 0, synthetic all 1: c = 0.5 and the
  // propensities go to 0/1, so pMSE -> 0.25.
  std::vector<double> zeros(50, 0.0), ones(50, 1.0);
  std::vector<double> noise(50);
  for (int i = 0; i < 50; ++i) noise[i] = i % 2;
  const auto real2 = make_dataset({{num_col("x"), numbers(zeros)}, {num_col("z"), numbers(noise)}});
  const auto syn2 = make_dataset({{num_col("x"), numbers(ones)}, {num_col("z"), numbers(noise)}});
  const auto r = spmse_index(real2, syn2);
  EXPECT_NEAR(r.c, 0.5, 1e-12);
  EXPECT_NEAR(r.pmse, 0.25, 5e-3);  // the l2 penalty keeps propensities off 0/1
  EXPECT_LT(r.score, 0.2);
}

TEST(Spmse, IdentityScoresHigh) {
  const auto fx = actg_like_fixture({400, 2, 0.6});
  const auto r = spmse_index(fx.data, fx.data);
  EXPECT_GE(r.score, 0.95);
  EXPECT_GE(r.pmse, 0.0);
}

TEST(Spmse, AllConstantFeaturesRejected) {
  const auto ds = make_dataset({{num_col("x"), numbers({1, 1, 1})}});
  EXPECT_THROW(spmse_index(ds, ds), MetricError);
}

TEST(Spmse, ConfigValidation) {
  EXPECT_THROW(MetricsConfig::from_json({{"spmse", {{"alpha", 1.0}}}}), ConfigError);
  EXPECT_THROW(MetricsConfig::from_json({{"spmse", {{"permutations", 0}}}}), ConfigError);
  EXPECT_THROW(MetricsConfig::from_json({{"kmeans", {{"k", 1}}}}), ConfigError);
  EXPECT_THROW(MetricsConfig::from_json({{"unknown", 1}}), ConfigError);
  const auto cfg = MetricsConfig::from_json({{"spmse", {{"alpha", 1.5}}}, {"coverage_bins", 7}});
  EXPECT_DOUBLE_EQ(cfg.spmse.alpha, 1.5);
  EXPECT_EQ(cfg.coverage_bins, 7u);
  EXPECT_EQ(cfg.kmeans.k, 10u);
}

TEST(KMeans, ClusterProportionExamples) {
  std::vector<double> uniform(10, 0.1);
  std::vector<double> one(10, 0.0);
  one[0] = 1.0;
  EXPECT_NEAR(cluster_proportion_score(uniform, one), 0.1, 1e-12);
  auto shifted = uniform;
  shifted[0] = 0.2;
  shifted[1] = 0.0;
  EXPECT_NEAR(cluster_proportion_score(uniform, shifted), 0.9, 1e-12);
}

TEST(KMeans, IdentityIsOne) {
  const auto fx = actg_like_fixture({300, 1, 0.6});
  EXPECT_DOUBLE_EQ(kmeans_score(fx.data, fx.data), 1.0);
}

TEST(KMeans, SyntheticInOneClusterScoresLow) {
  // Ten well separated real clusters of 20 points; synthetic points all sit
  // on the first cluster.
  Rng rng(3);
  std::vector<double> xr, xs;
  for (int c = 0; c < 10; ++c) {
    for (int i = 0; i < 20; ++i) xr.push_back(100.0 * c + rng.normal(0.0, 0.1));
  }
  for (int i = 0; i < 200; ++i) xs.push_back(rng.normal(0.0, 0.1));
  const auto real = make_dataset({{num_col("x"), numbers(xr)}});
  const auto syn = make_dataset({{num_col("x"), numbers(xs)}});
  EXPECT_NEAR(kmeans_score(real, syn), 0.1, 1e-12);
}

TEST(KMeans, TooFewRowsRejected) {
  const auto ds = make_dataset({{num_col("x"), numbers({1, 2, 3})}});
  EXPECT_THROW(kmeans_score(ds, ds), MetricError);
}

TEST(Compound, Examples) {
  const std::vector<MetricValue> four = {{"a", 0.2}, {"b", 0.9}, {"c", 0.6}, {"d", 0.7}};
  EXPECT_NEAR(compound_score(four), 0.6, 1e-12);
  EXPECT_NEAR(compound_score(four, {{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}}), 0.6, 1e-12);
  const std::vector<MetricValue> half = {{"a", 0.5}, {"b", 0.5}};
  EXPECT_DOUBLE_EQ(compound_score(half), 0.5);
  const std::vector<MetricValue> single = {{"a", 0.37}};
  EXPECT_DOUBLE_EQ(compound_score(single, {{"a", 1.0}}), 0.37);
}

TEST(Compound, WeightMismatchRejected) {
  const std::vector<MetricValue> v = {{"a", 0.2}, {"b", 0.9}};
  EXPECT_THROW(compound_score(v, {{"a", 1.0}}), MetricError);
  EXPECT_THROW(compound_score(v, {{"a", 1.0}, {"c", 1.0}}), MetricError);
  EXPECT_THROW(compound_score(v, {{"a", 0.0}, {"b", 0.0}}), MetricError);
  EXPECT_THROW(compound_score(v, {{"a", -1.0}, {"b", 2.0}}), MetricError);
}

TEST(MetricReportType, RejectsDuplicates) {
  MetricReport r;
  r.add("x", 0.5);
  EXPECT_THROW(r.add("x", 0.6), MetricError);
  EXPECT_EQ(r.get("x"), 0.5);
  EXPECT_FALSE(r.get("y").has_value());
}
