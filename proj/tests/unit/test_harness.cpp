#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "synthcheck/error.hpp"
#include "synthcheck/fixtures.hpp"
#include "synthcheck/harness.hpp"
#include "synthcheck/random.hpp"
#include "test_support.hpp"

using namespace synthcheck;
using namespace testing_support;

namespace {

namespace mn = metric_names;

const std::vector<std::string> kCheap = {mn::basic_statistical, mn::support_coverage, mn::survival};

struct Split {
  Fixture fx;
  SplitResult parts;
};

const Split& data() {
  static const Split s = [] {
    auto fx = actg_like_fixture({150, 12, 0.6});
    auto parts = stratified_split(fx.data, 0.2, 1);
    return Split{std::move(fx), std::move(parts)};
  }();
  return s;
}

ExperimentPlan cheap_plan() {
  ExperimentPlan plan;
  plan.sets = {{"default", nlohmann::json::object()}, {"tight", {{"correlation_shrinkage", 0.2}, {"jitter", 0.05}}}};
  plan.metric_set = kCheap;
  plan.evaluation.survival = data().fx.schema.survival;
  plan.pipeline.survival = data().fx.schema.survival;
  return plan;
}

// Fails whenever the sample seed is 3.
class FlakyGenerator : public Generator {
 public:
  std::string name() const override { return "flaky"; }
  Dataset fit_sample(const Dataset& train, const nlohmann::json& hp, std::size_t n, std::uint64_t ts,
                     std::uint64_t ss) override {
    if (ss == 3) throw GeneratorError("seed 3 always fails");
    return inner_.fit_sample(train, hp, n, ts, ss);
  }

 private:
  CopulaGenerator inner_;
};

MatrixCell cell(std::string set, std::uint64_t ts, std::uint64_t ss, std::vector<std::pair<std::string, double>> v) {
  MatrixCell c;
  c.set = std::move(set);
  c.train_seed = ts;
  c.sample_seed = ss;
  for (const auto& [name, value] : v) c.report.add(name, value);
  return c;
}

}  // namespace

TEST(Context, DefaultEndpoint) {
  EXPECT_EQ(default_endpoint(data().fx.schema), "EFSSTAT");
  SchemaDocument plain{{bin_col("y", {ColumnRole::outcome}), num_col("x")}, std::nullopt};
  EXPECT_EQ(default_endpoint(plain), "y");
  SchemaDocument none{{num_col("x")}, std::nullopt};
  EXPECT_THROW(default_endpoint(none), ConfigError);
}

TEST(Context, TunesOnlyForMlEfficiency) {
  TuningCache cache;
  ContextOptions opt;
  opt.tuning_budget = 1;
  const auto& d = data();
  const auto no_ml = prepare_context(d.fx.schema, d.parts.train, kCheap, opt, &cache);
  EXPECT_FALSE(no_ml.classifier.has_value());
  EXPECT_EQ(cache.tune_calls(), 0u);
  const auto ml = prepare_context(d.fx.schema, d.parts.train, {mn::ml_efficiency}, opt, &cache);
  ASSERT_TRUE(ml.classifier.has_value());
  EXPECT_EQ(ml.endpoint->label_column, "EFSSTAT");
  EXPECT_EQ(cache.tune_calls(), 1u);
}

TEST(Evaluate, IdentityAndUnknownMetric) {
  const auto& d = data();
  EvaluationContext ctx;
  ctx.survival = d.fx.schema.survival;
  const auto r = evaluate_metrics(d.parts.test, d.parts.test, d.parts.test, ctx, kCheap);
  for (const auto& name : kCheap) EXPECT_DOUBLE_EQ(*r.get(name), 1.0) << name;
  EXPECT_THROW(evaluate_metrics(d.parts.test, d.parts.test, d.parts.test, ctx, {"fid"}), MetricError);
  EXPECT_THROW(evaluate_metrics(d.parts.test, d.parts.test, d.parts.test, ctx, {mn::ml_efficiency}), Error);
}

TEST(Plan, Validation) {
  auto plan = cheap_plan();
  EXPECT_NO_THROW(plan.check());
  plan.sets.push_back(plan.sets.front());
  EXPECT_THROW(plan.check(), ConfigError);
  plan = cheap_plan();
  plan.train_seeds.clear();
  EXPECT_THROW(plan.check(), ConfigError);
  plan = cheap_plan();
  plan.drop_invalid = true;
  EXPECT_THROW(plan.check(), ConfigError);
  plan = cheap_plan();
  plan.metric_set.clear();
  EXPECT_THROW(plan.check(), ConfigError);
}

TEST(Experiment, CellCountAndOrder) {
  CopulaGenerator gen;
  const auto m = run_experiment(cheap_plan(), gen, data().parts.train, data().parts.test);
  ASSERT_EQ(m.cells.size(), 50u);
  EXPECT_EQ(m.failed(), 0u);
  EXPECT_EQ(m.cells.front().set, "default");
  EXPECT_EQ(m.cells.back().set, "tight");
  EXPECT_EQ(m.cells[1].sample_seed, 1u);
  EXPECT_EQ(m.cells[5].train_seed, 1u);
  EXPECT_EQ(m.cells[7].report.synthetic_id, "default/1/2");
}

TEST(Experiment, Deterministic) {
  CopulaGenerator gen;
  auto plan = cheap_plan();
  plan.train_seeds = {0, 1};
  plan.sample_seeds = {0};
  const auto a = run_experiment(plan, gen, data().parts.train, data().parts.test);
  const auto b = run_experiment(plan, gen, data().parts.train, data().parts.test);
  EXPECT_EQ(a.to_json(), b.to_json());
  EXPECT_EQ(EvaluationMatrix::from_json(a.to_json()).to_json(), a.to_json());
}

TEST(Experiment, DropInvalidOnValidDataChangesNothing) {
  // A generator that returns the training rows unchanged never violates.
  class Echo : public Generator {
   public:
    std::string name() const override { return "echo"; }
    Dataset fit_sample(const Dataset& train, const nlohmann::json&, std::size_t n, std::uint64_t,
                       std::uint64_t) override {
      std::vector<std::size_t> rows(n);
      for (std::size_t i = 0; i < n; ++i) rows[i] = i % train.rows();
      return train.select_rows(rows);
    }
  } echo;
  auto plan = cheap_plan();
  plan.train_seeds = {0};
  plan.sample_seeds = {0, 1};
  plan.constraints = actg_constraint_config();
  const auto off = run_experiment(plan, echo, data().parts.train, data().parts.test);
  plan.drop_invalid = true;
  const auto on = run_experiment(plan, echo, data().parts.train, data().parts.test);
  for (std::size_t i = 0; i < off.cells.size(); ++i) {
    EXPECT_EQ(on.cells[i].removed, 0u);
    EXPECT_EQ(on.cells[i].report.values, off.cells[i].report.values);
  }
}

TEST(Experiment, FailuresRecorded) {
  FlakyGenerator gen;
  auto plan = cheap_plan();
  plan.sets.resize(1);
  plan.train_seeds = {0, 1};
  plan.sample_seeds = {2, 3};
  const auto m = run_experiment(plan, gen, data().parts.train, data().parts.test);
  ASSERT_EQ(m.cells.size(), 4u);
  EXPECT_EQ(m.failed(), 2u);
  EXPECT_FALSE(m.cells[1].ok);
  EXPECT_NE(m.cells[1].error.find("seed 3"), std::string::npos);
  const auto agg = aggregate(m);
  EXPECT_EQ(agg.failed_cells, (std::vector<std::string>{"default/0/3", "default/1/3"}));
  EXPECT_EQ(agg.metrics.at(mn::basic_statistical).n, 2u);
}

TEST(Describe, Stats) {
  const auto s = describe({0.5, 0.5, 0.5});
  EXPECT_DOUBLE_EQ(s.mean, 0.5);
  EXPECT_DOUBLE_EQ(s.std, 0.0);
  const auto t = describe({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(t.mean, 2.5);
  EXPECT_NEAR(t.std, std::sqrt(5.0 / 3.0), 1e-12);
  EXPECT_DOUBLE_EQ(t.min, 1);
  EXPECT_DOUBLE_EQ(t.max, 4);
  EXPECT_DOUBLE_EQ(describe({7}).std, 0.0);
}

TEST(Aggregate, ConstantIdenticalAndAntiMonotone) {
  EvaluationMatrix m;
  const double xs[] = {1, 2, 3};
  for (int i = 0; i < 3; ++i) {
    m.cells.push_back(cell("s", 0, static_cast<std::uint64_t>(i),
                           {{mn::basic_statistical, 0.5},
                            {mn::support_coverage, xs[i] / 10},
                            {mn::log_correlation, xs[i] / 10},
                            {mn::kmeans, (4 - xs[i]) / 10}}));
  }
  const auto a = aggregate(m);
  EXPECT_DOUBLE_EQ(a.metrics.at(mn::basic_statistical).mean, 0.5);
  EXPECT_DOUBLE_EQ(a.metrics.at(mn::basic_statistical).std, 0.0);
  ASSERT_TRUE(a.pearson && a.spearman);
  // metric_order follows the canonical list: bsm, coverage, logcorr, kmeans.
  EXPECT_EQ(a.metric_order, (std::vector<std::string>{mn::basic_statistical, mn::support_coverage,
                                                      mn::log_correlation, mn::kmeans}));
  EXPECT_NEAR((*a.pearson)(1, 2), 1.0, 1e-12);
  EXPECT_NEAR((*a.spearman)(1, 3), -1.0, 1e-12);
  EXPECT_DOUBLE_EQ((*a.pearson)(0, 0), 1.0);
  EXPECT_EQ(a.rows, 3u);
}

TEST(Aggregate, SingleRowOmitsCorrelations) {
  EvaluationMatrix m;
  m.cells.push_back(cell("s", 0, 0, {{mn::basic_statistical, 0.5}}));
  const auto a = aggregate(m);
  EXPECT_FALSE(a.pearson.has_value());
  EXPECT_TRUE(a.to_json().at("correlations").at("omitted").get<bool>());
  EXPECT_THROW(aggregate(EvaluationMatrix{}), MetricError);
}

TEST(Aggregate, PermutationInvariant) {
  EvaluationMatrix m;
  Rng rng(4);
  for (const char* set : {"a", "b"}) {
    for (std::uint64_t i = 0; i < 6; ++i) {
      m.cells.push_back(cell(set, i / 3, i % 3,
                             {{mn::basic_statistical, rng.uniform()},
                              {mn::survival, rng.uniform()},
                              {mn::spmse, rng.uniform()}}));
    }
  }
  const auto ref = aggregate(m).to_json();
  for (int k = 0; k < 5; ++k) {
    rng.shuffle(m.cells.begin(), m.cells.end());
    EXPECT_EQ(aggregate(m).to_json(), ref);
  }
}

TEST(Aggregate, SetAverages) {
  EvaluationMatrix m;
  m.cells.push_back(cell("a", 0, 0, {{mn::basic_statistical, 0.2}, {mn::survival, 0.4}}));
  m.cells.push_back(cell("a", 0, 1, {{mn::basic_statistical, 0.4}, {mn::survival, 0.6}}));
  m.cells.push_back(cell("b", 0, 0, {{mn::basic_statistical, 0.9}, {mn::survival, 0.9}}));
  const auto a = aggregate(m);
  EXPECT_NEAR(a.set_average.at("a"), 0.4, 1e-12);
  EXPECT_NEAR(a.set_average.at("b"), 0.9, 1e-12);
  EXPECT_NEAR(a.per_set.at("a").at(mn::survival).mean, 0.5, 1e-12);
}

TEST(Ranking, PublishedAverages) {
  const auto r = rank_strategies(
      {{"default", 0.6415}, {"survival", 0.6474}, {"ml", 0.6522}, {"four_metrics", 0.6779}, {"full", 0.6856}});
  EXPECT_EQ(r.ranks, (std::vector<std::size_t>{5, 4, 3, 2, 1}));
  ASSERT_TRUE(r.improvements.has_value());
  EXPECT_DOUBLE_EQ((*r.improvements)[0], 0.0);
}

TEST(Ranking, ImprovementOverDefault) {
  const auto r = rank_strategies({{"default", 0.5058}, {"survival", 0.7910}});
  EXPECT_NEAR((*r.improvements)[1], 0.7910 / 0.5058 - 1.0, 1e-12);
  EXPECT_NEAR(100.0 * (*r.improvements)[1], 56.4, 0.05);
}

TEST(Ranking, TiesKeepDeclarationOrder) {
  const auto r = rank_strategies({{"default", 0.6}, {"ml", 0.6}, {"full", 0.6}});
  EXPECT_EQ(r.ranks, (std::vector<std::size_t>{1, 2, 3}));
  for (double v : *r.improvements) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(Ranking, WithoutDefault) {
  const auto r = rank_strategies({{"ml", 0.3}, {"full", 0.4}});
  EXPECT_FALSE(r.improvements.has_value());
  EXPECT_EQ(r.ranks, (std::vector<std::size_t>{2, 1}));
  EXPECT_THROW(rank_strategies({{"ml", 0.3}}), MetricError);
}

TEST(CvObjective, ScoresEachFold) {
  const auto& d = data();
  CopulaGenerator gen;
  EvaluationContext ctx;
  ctx.survival = d.fx.schema.survival;
  PipelineOptions pipe;
  pipe.survival = d.fx.schema.survival;
  auto folds = kfold(d.parts.train, 3, 0);
  Strategy strat;
  strat.metrics = kCheap;
  const auto eval = make_cv_objective(gen, folds, strat, ctx, pipe, 0, 0);
  const double s0 = eval(Params::object(), 0);
  EXPECT_GT(s0, 0.0);
  EXPECT_LE(s0, 1.0);
  EXPECT_DOUBLE_EQ(eval(Params::object(), 0), s0);
  EXPECT_DOUBLE_EQ(eval(Params::object(), 3), s0);
}
