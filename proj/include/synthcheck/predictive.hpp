#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "synthcheck/dataset.hpp"
#include "synthcheck/encoding.hpp"
#include "synthcheck/gbdt.hpp"
#include "synthcheck/random.hpp"

namespace synthcheck {

struct ClassifierSpec {
  std::size_t n_trees = 100;
  std::size_t max_depth = 3;
  double learning_rate = 0.1;
  std::size_t min_samples_leaf = 5;
  double subsample_fraction = 1.0;
  std::uint64_t seed = 0;

  void check() const;
  nlohmann::json to_json() const;
  static ClassifierSpec from_json(const nlohmann::json& j);
  bool operator==(const ClassifierSpec&) const = default;
};

struct EndpointSpec {
  std::string label_column;
  std::vector<std::string> feature_columns;

  /// Every column except the label and, for a survival-status label, the
  /// survival time columns and the other survival status columns.
  static EndpointSpec for_label(const Schema& schema, const std::string& label,
                                const std::optional<SurvivalColumns>& survival = std::nullopt);
};

class TrainedClassifier {
 public:
  Eigen::VectorXd predict_proba(const Dataset& ds) const;
  std::vector<int> predict(const Dataset& ds, double threshold = 0.5) const;

  std::size_t rows_used() const noexcept { return rows_used_; }
  std::size_t dropped_missing_label() const noexcept { return dropped_; }
  const EndpointSpec& endpoint() const noexcept { return endpoint_; }

 private:
  friend TrainedClassifier fit_classifier(const Dataset&, const EndpointSpec&, const ClassifierSpec&);

  GbdtClassifier model_;
  EncodingPlan plan_;
  EndpointSpec endpoint_;
  std::size_t rows_used_ = 0;
  std::size_t dropped_ = 0;
};

/// Throws MetricError when the labels hold a single class.
TrainedClassifier fit_classifier(const Dataset& train, const EndpointSpec& endpoint, const ClassifierSpec& spec);

/// 0/1 labels of the endpoint column; -1 where missing.
std::vector<int> endpoint_labels(const Dataset& ds, const std::string& label_column);

/// Matthews correlation; 0 when any marginal count is zero.
double mcc(std::span<const int> truth, std::span<const int> pred);

/// Mean k-fold MCC of spec on data, folds stratified by the label.
double cross_validated_mcc(const Dataset& data, const EndpointSpec& endpoint, const ClassifierSpec& spec,
                           std::size_t folds, std::uint64_t seed);

/// Draws one spec from the tuning grid.
ClassifierSpec sample_classifier_spec(Rng& rng, std::uint64_t seed);

struct TuningResult {
  ClassifierSpec spec;
  double cv_mcc = 0.0;
  std::size_t evaluated = 0;
};

/// Random search over the grid scored by 5-fold CV MCC; ties keep the
/// earlier draw.
TuningResult tune_classifier(const Dataset& real_train, const EndpointSpec& endpoint, std::size_t budget,
                             std::uint64_t seed, std::size_t folds = 5);

/// Tuned specs keyed by (dataset hash, endpoint), optionally backed by a JSON
/// file. Safe to share between threads.
class TuningCache {
 public:
  TuningCache() = default;
  explicit TuningCache(std::filesystem::path file);

  ClassifierSpec get_or_tune(const Dataset& real_train, const EndpointSpec& endpoint, std::size_t budget,
                             std::uint64_t seed);
  std::optional<ClassifierSpec> find(const Dataset& real_train, const std::string& label) const;
  std::size_t tune_calls() const;
  void save() const;

  static std::string key(const Dataset& real_train, const std::string& label);

 private:
  mutable std::mutex mutex_;
  std::map<std::string, ClassifierSpec> entries_;
  std::optional<std::filesystem::path> file_;
  std::size_t tune_calls_ = 0;
};

struct MlEfficiencyResult {
  double value = 0.0;
  /// Synthetic labels held a single class; value forced to 0.
  bool degenerate = false;
};

/// Fits on syn only and scores MCC on real_test.
MlEfficiencyResult ml_efficiency(const Dataset& syn, const Dataset& real_test, const EndpointSpec& endpoint,
                                 const ClassifierSpec& spec);

}  // namespace synthcheck
