#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "synthcheck/dataset.hpp"
#include "synthcheck/kmeans.hpp"

namespace synthcheck {

namespace metric_names {
inline constexpr const char* basic_statistical = "basic_statistical_measure";
inline constexpr const char* support_coverage = "regularized_support_coverage";
inline constexpr const char* log_correlation = "log_correlation";
inline constexpr const char* spmse = "spmse_index";
inline constexpr const char* kmeans = "kmeans_score";
inline constexpr const char* survival = "survival_metric";
inline constexpr const char* ml_efficiency = "ml_efficiency";
}  // namespace metric_names

/// All metric identifiers in canonical order.
const std::vector<std::string>& all_metric_names();

struct MetricValue {
  std::string name;
  double value = 0.0;

  bool operator==(const MetricValue&) const = default;
};

struct MetricReport {
  std::vector<MetricValue> values;
  std::string real_id;
  std::string synthetic_id;
  std::uint64_t seed = 0;
  /// Free-form diagnostics (solver non-convergence, excluded rows, ...).
  nlohmann::json details = nlohmann::json::object();

  std::optional<double> get(const std::string& name) const;
  /// Throws MetricError on duplicates.
  void add(const std::string& name, double value);
};

struct SpmseConfig {
  double alpha = 1.2;
  std::size_t permutations = 20;
  double l2_lambda = 1e-4;
  std::size_t max_iterations = 1000;
  double tolerance = 1e-8;
  std::uint64_t seed = 0;
};

struct PropensityResult {
  double pmse = 0.0;
  double pmse0 = 0.0;
  double c = 0.0;
  double ratio = 0.0;
  double score = 0.0;
  bool converged = true;
};

struct MetricsConfig {
  SpmseConfig spmse;
  KMeansConfig kmeans;
  std::size_t coverage_bins = 10;
  /// Pairs whose real association falls below this are skipped by
  /// log_correlation_score. Off when unset.
  std::optional<double> min_correlation;

  static MetricsConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

double basic_statistical_measure(const Dataset& real, const Dataset& syn);

double regularized_support_coverage(const Dataset& real, const Dataset& syn, std::size_t bins = 10);

/// Association in [0,1] between two columns: |Pearson| (numeric pair),
/// correlation ratio (mixed pair), mean of both Theil's U directions
/// (discrete pair).
double column_association(const Dataset& ds, std::size_t a, std::size_t b);

/// 1 - min(1, |ln(1+a_real) - ln(1+a_syn)| / ln 2).
double log_correlation_pair_score(double a_real, double a_syn);

double log_correlation_score(const Dataset& real, const Dataset& syn,
                             std::optional<double> min_correlation = std::nullopt);

/// min(1, alpha * pmse0 / pmse); 1 when pmse is 0.
double spmse_score(double pmse, double pmse0, double alpha);

PropensityResult spmse_index(const Dataset& real, const Dataset& syn, const SpmseConfig& config = {});

/// Mean over clusters of min(p_syn / p_real, 1). Clusters without real mass
/// are skipped.
double cluster_proportion_score(const std::vector<double>& p_real, const std::vector<double>& p_syn);

double kmeans_score(const Dataset& real, const Dataset& syn, const KMeansConfig& config = {});

/// Weighted mean sum(w_i v_i) / sum(w_i). Weights must name exactly the
/// metrics present.
double compound_score(const std::vector<MetricValue>& values, const std::map<std::string, double>& weights);

/// Equal weights over the given values.
double compound_score(const std::vector<MetricValue>& values);

}  // namespace synthcheck
