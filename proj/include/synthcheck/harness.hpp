#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "synthcheck/constraints.hpp"
#include "synthcheck/dataset.hpp"
#include "synthcheck/generators.hpp"
#include "synthcheck/hpo.hpp"
#include "synthcheck/io.hpp"
#include "synthcheck/metrics.hpp"
#include "synthcheck/predictive.hpp"
#include "synthcheck/transforms.hpp"

namespace synthcheck {

struct EvaluationContext {
  MetricsConfig metrics;
  std::optional<SurvivalColumns> survival;
  /// Required for ML Efficiency.
  std::optional<EndpointSpec> endpoint;
  std::optional<ClassifierSpec> classifier;
};

/// EFSSTAT when the schema has a survival block, otherwise the first binary
/// outcome column. Throws ConfigError when neither exists.
std::string default_endpoint(const SchemaDocument& schema);

struct ContextOptions {
  MetricsConfig metrics;
  std::optional<std::string> endpoint;
  std::size_t tuning_budget = 30;
  std::uint64_t tuning_seed = 0;
};

/// Fills the survival columns and, when ML Efficiency is requested, tunes
/// the classifier on real_train (through cache when given).
EvaluationContext prepare_context(const SchemaDocument& schema, const Dataset& real_train,
                                  const std::vector<std::string>& metrics, const ContextOptions& options,
                                  TuningCache* cache = nullptr);

/// Computes the requested metrics. Fidelity metrics compare syn with
/// reference; ML Efficiency trains on syn and tests on ml_test.
MetricReport evaluate_metrics(const Dataset& reference, const Dataset& syn, const Dataset& ml_test,
                              const EvaluationContext& context, const std::vector<std::string>& metrics);

/// Round evaluator for optimize(): round r fits the generator on the training
/// part of fold r, samples as many rows, scores fidelity against that
/// training part and ML Efficiency against the fold's holdout.
RoundEvaluator make_cv_objective(Generator& generator, std::vector<Fold> folds, Strategy strategy,
                                 EvaluationContext context, PipelineOptions pipeline, std::uint64_t train_seed,
                                 std::uint64_t sample_seed);

// ---------------------------------------------------------------------------
// Experiments

struct HyperparameterSet {
  std::string name;
  Params params = nlohmann::json::object();
};

struct ExperimentPlan {
  std::vector<HyperparameterSet> sets;
  std::vector<std::uint64_t> train_seeds = {0, 1, 2, 3, 4};
  std::vector<std::uint64_t> sample_seeds = {0, 1, 2, 3, 4};
  EvaluationContext evaluation;
  std::vector<std::string> metric_set = all_metric_names();
  std::optional<ConstraintConfig> constraints;
  bool drop_invalid = false;
  PipelineOptions pipeline;

  void check() const;
};

struct MatrixCell {
  std::string set;
  std::uint64_t train_seed = 0;
  std::uint64_t sample_seed = 0;
  bool ok = true;
  std::string error;
  MetricReport report;
  nlohmann::json constraints;  // rates, counts and match ratios before removal
  std::size_t removed = 0;
  double seconds = 0.0;
};

struct EvaluationMatrix {
  std::vector<MatrixCell> cells;

  std::size_t failed() const;
  /// Wall-clock is left out; see timings_json.
  nlohmann::json to_json() const;
  nlohmann::json timings_json() const;
  static EvaluationMatrix from_json(const nlohmann::json& doc);
};

/// Cells in (set, train_seed, sample_seed) order. Failures are recorded in
/// the cell and the run continues.
EvaluationMatrix run_experiment(const ExperimentPlan& plan, Generator& generator, const Dataset& real_train,
                                const Dataset& real_test);

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single value
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 0;
};

MetricStats describe(std::vector<double> values);

struct AggregateReport {
  std::vector<std::string> metric_order;
  std::map<std::string, MetricStats> metrics;
  std::map<std::string, std::map<std::string, MetricStats>> per_set;
  /// Mean over a set's cells of the cell's all-metric average.
  std::map<std::string, double> set_average;
  std::optional<Eigen::MatrixXd> pearson;
  std::optional<Eigen::MatrixXd> spearman;
  std::size_t rows = 0;
  std::vector<std::string> failed_cells;

  nlohmann::json to_json() const;
};

/// Throws MetricError with no successful cells; correlations are omitted
/// below two rows.
AggregateReport aggregate(const EvaluationMatrix& matrix);

struct StrategyRanking {
  std::vector<std::string> names;
  std::vector<double> averages;
  std::vector<std::size_t> ranks;  // 1 = best
  std::optional<std::vector<double>> improvements;

  nlohmann::json to_json() const;
};

/// Ranks by descending average, ties in declaration order. Improvements
/// avg / avg_default - 1 are reported when default_name is present.
StrategyRanking rank_strategies(const std::vector<std::pair<std::string, double>>& averages,
                                const std::string& default_name = "default");

nlohmann::json metric_report_json(const MetricReport& report);

}  // namespace synthcheck
