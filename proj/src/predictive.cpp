#include "synthcheck/predictive.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "synthcheck/error.hpp"
#include "synthcheck/transforms.hpp"

namespace synthcheck {

namespace {

Dataset labelled_rows(const Dataset& ds, const std::string& label, std::size_t* dropped) {
  const auto labels = endpoint_labels(ds, label);
  std::vector<std::size_t> keep;
  keep.reserve(labels.size());
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] >= 0) keep.push_back(r);
  }
  if (dropped) *dropped = labels.size() - keep.size();
  return keep.size() == labels.size() ? ds : ds.select_rows(keep);
}

bool single_class(const std::vector<int>& labels) {
  return std::adjacent_find(labels.begin(), labels.end(), std::not_equal_to<>()) == labels.end();
}

std::vector<std::string> excluded_columns(const Schema& schema, const EndpointSpec& endpoint) {
  std::vector<std::string> out;
  for (const auto& col : schema) {
    if (std::find(endpoint.feature_columns.begin(), endpoint.feature_columns.end(), col.name) ==
        endpoint.feature_columns.end()) {
      out.push_back(col.name);
    }
  }
  return out;
}

}  // namespace

void ClassifierSpec::check() const {
  if (n_trees < 1) throw ConfigError("classifier n_trees must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw ConfigError("classifier learning_rate must lie in (0, 1]");
  if (!(subsample_fraction > 0.0 && subsample_fraction <= 1.0)) {
    throw ConfigError("classifier subsample_fraction must lie in (0, 1]");
  }
  if (max_depth < 1) throw ConfigError("classifier max_depth must be >= 1");
}

nlohmann::json ClassifierSpec::to_json() const {
  return {{"n_trees", n_trees},
          {"max_depth", max_depth},
          {"learning_rate", learning_rate},
          {"min_samples_leaf", min_samples_leaf},
          {"subsample_fraction", subsample_fraction},
          {"seed", seed}};
}

ClassifierSpec ClassifierSpec::from_json(const nlohmann::json& j) {
  ClassifierSpec s;
  try {
    s.n_trees = j.at("n_trees").get<std::size_t>();
    s.max_depth = j.at("max_depth").get<std::size_t>();
    s.learning_rate = j.at("learning_rate").get<double>();
    s.min_samples_leaf = j.at("min_samples_leaf").get<std::size_t>();
    s.subsample_fraction = j.at("subsample_fraction").get<double>();
    s.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed classifier spec: ") + e.what());
  }
  s.check();
  return s;
}

EndpointSpec EndpointSpec::for_label(const Schema& schema, const std::string& label,
                                     const std::optional<SurvivalColumns>& survival) {
  const auto it = std::find_if(schema.begin(), schema.end(), [&](const ColumnSchema& c) { return c.name == label; });
  if (it == schema.end()) throw DataError("endpoint column '" + label + "' not found");
  if (it->kind != ColumnKind::binary) throw DataError("endpoint column '" + label + "' is not binary");

  std::set<std::string> times;
  std::set<std::string> statuses;
  for (const auto& c : schema) {
    if (c.has_role(ColumnRole::survival_time)) times.insert(c.name);
    if (c.has_role(ColumnRole::survival_status)) statuses.insert(c.name);
  }
  if (survival) {
    times.insert({survival->ostm, survival->efstm, survival->efstm_dif});
    statuses.insert({survival->osstat, survival->efsstat});
  }
  const bool survival_endpoint = statuses.count(label) > 0;

  EndpointSpec spec;
  spec.label_column = label;
  for (const auto& c : schema) {
    if (c.name == label) continue;
    if (survival_endpoint && (times.count(c.name) || statuses.count(c.name))) continue;
    spec.feature_columns.push_back(c.name);
  }
  return spec;
}

std::vector<int> endpoint_labels(const Dataset& ds, const std::string& label_column) {
  const auto c = ds.index_of(label_column);
  if (ds.column_schema(c).kind != ColumnKind::binary) throw DataError("endpoint column '" + label_column + "' is not binary");
  std::vector<int> out(ds.rows());
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    const double v = ds.number(r, c);
    out[r] = std::isnan(v) ? -1 : static_cast<int>(v);
  }
  return out;
}

Eigen::VectorXd TrainedClassifier::predict_proba(const Dataset& ds) const {
  return model_.predict_proba(plan_.transform(ds));
}

std::vector<int> TrainedClassifier::predict(const Dataset& ds, double threshold) const {
  const auto p = predict_proba(ds);
  std::vector<int> out(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = p[i] >= threshold ? 1 : 0;
  return out;
}

TrainedClassifier fit_classifier(const Dataset& train, const EndpointSpec& endpoint, const ClassifierSpec& spec) {
  spec.check();
  TrainedClassifier out;
  const auto data = labelled_rows(train, endpoint.label_column, &out.dropped_);
  const auto labels = endpoint_labels(data, endpoint.label_column);
  if (labels.empty() || single_class(labels)) {
    throw MetricError("classifier training labels for '" + endpoint.label_column + "' hold a single class");
  }
  const auto exclude = excluded_columns(data.schema(), endpoint);
  out.plan_ = EncodingPlan::fit(data, exclude);
  Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) y[static_cast<Eigen::Index>(i)] = labels[i];
  GbdtParams params;
  params.n_trees = spec.n_trees;
  params.max_depth = spec.max_depth;
  params.learning_rate = spec.learning_rate;
  params.min_samples_leaf = spec.min_samples_leaf;
  params.subsample = spec.subsample_fraction;
  params.seed = spec.seed;
  out.model_ = GbdtClassifier::fit(out.plan_.transform(data), y, params);
  out.endpoint_ = endpoint;
  out.rows_used_ = data.rows();
  return out;
}

double mcc(std::span<const int> truth, std::span<const int> pred) {
  if (truth.size() != pred.size()) throw MetricError("mcc: length mismatch");
  if (truth.empty()) throw MetricError("mcc: empty input");
  double tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] == 1;
    const bool p = pred[i] == 1;
    if (t && p) ++tp;
    else if (!t && !p) ++tn;
    else if (p) ++fp;
    else ++fn;
  }
  const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (den == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(den);
}

double cross_validated_mcc(const Dataset& data, const EndpointSpec& endpoint, const ClassifierSpec& spec,
                           std::size_t folds, std::uint64_t seed) {
  const auto labelled = labelled_rows(data, endpoint.label_column, nullptr);
  const std::vector<std::string> key{endpoint.label_column};
  const auto parts = kfold(labelled, folds, seed, key);
  double total = 0.0;
  for (const auto& fold : parts) {
    const auto train_labels = endpoint_labels(fold.train, endpoint.label_column);
    if (single_class(train_labels)) continue;
    const auto model = fit_classifier(fold.train, endpoint, spec);
    const auto truth = endpoint_labels(fold.holdout, endpoint.label_column);
    total += mcc(truth, model.predict(fold.holdout));
  }
  return total / static_cast<double>(parts.size());
}

ClassifierSpec sample_classifier_spec(Rng& rng, std::uint64_t seed) {
  static constexpr std::size_t trees[] = {50, 100, 200, 400};
  static constexpr std::size_t depths[] = {2, 3, 4, 6};
  static constexpr std::size_t leaves[] = {1, 5, 20};
  static constexpr double subsamples[] = {0.7, 1.0};
  ClassifierSpec s;
  s.n_trees = trees[rng.index(4)];
  s.max_depth = depths[rng.index(4)];
  s.learning_rate = std::exp(rng.uniform(std::log(0.01), std::log(0.3)));
  s.min_samples_leaf = leaves[rng.index(3)];
  s.subsample_fraction = subsamples[rng.index(2)];
  s.seed = seed;
  return s;
}

TuningResult tune_classifier(const Dataset& real_train, const EndpointSpec& endpoint, std::size_t budget,
                             std::uint64_t seed, std::size_t folds) {
  if (budget < 1) throw ConfigError("classifier tuning budget must be >= 1");
  Rng rng(mix_seed(seed, 0x7475));
  TuningResult best;
  best.cv_mcc = -INFINITY;
  for (std::size_t i = 0; i < budget; ++i) {
    const auto spec = sample_classifier_spec(rng, seed);
    const double score = cross_validated_mcc(real_train, endpoint, spec, folds, seed);
    if (score > best.cv_mcc) {
      best.cv_mcc = score;
      best.spec = spec;
    }
    ++best.evaluated;
  }
  return best;
}

TuningCache::TuningCache(std::filesystem::path file) : file_(std::move(file)) {
  if (!std::filesystem::exists(*file_)) return;
  std::ifstream in(*file_);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("unreadable classifier cache " + file_->string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("classifier cache must be a JSON object");
  for (const auto& [k, v] : doc.items()) entries_.emplace(k, ClassifierSpec::from_json(v));
}

std::string TuningCache::key(const Dataset& real_train, const std::string& label) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(dataset_hash(real_train)));
  return std::string(buf) + ":" + label;
}

std::optional<ClassifierSpec> TuningCache::find(const Dataset& real_train, const std::string& label) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(key(real_train, label));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

ClassifierSpec TuningCache::get_or_tune(const Dataset& real_train, const EndpointSpec& endpoint, std::size_t budget,
                                        std::uint64_t seed) {
  const auto k = key(real_train, endpoint.label_column);
  {
    std::lock_guard lock(mutex_);
    if (const auto it = entries_.find(k); it != entries_.end()) return it->second;
  }
  const auto tuned = tune_classifier(real_train, endpoint, budget, seed).spec;
  std::lock_guard lock(mutex_);
  ++tune_calls_;
  const auto [it, inserted] = entries_.emplace(k, tuned);
  return it->second;
}

std::size_t TuningCache::tune_calls() const {
  std::lock_guard lock(mutex_);
  return tune_calls_;
}

void TuningCache::save() const {
  if (!file_) return;
  nlohmann::json doc = nlohmann::json::object();
  {
    std::lock_guard lock(mutex_);
    for (const auto& [k, v] : entries_) doc[k] = v.to_json();
  }
  std::ofstream out(*file_);
  if (!out) throw Error("cannot write classifier cache " + file_->string());
  out << doc.dump(2) << '\n';
}

MlEfficiencyResult ml_efficiency(const Dataset& syn, const Dataset& real_test, const EndpointSpec& endpoint,
                                 const ClassifierSpec& spec) {
  const auto syn_labels = endpoint_labels(syn, endpoint.label_column);
  std::vector<int> present;
  for (int l : syn_labels) {
    if (l >= 0) present.push_back(l);
  }
  if (present.empty() || single_class(present)) return {0.0, true};
  const auto model = fit_classifier(syn, endpoint, spec);
  const auto test = labelled_rows(real_test, endpoint.label_column, nullptr);
  if (test.empty()) throw MetricError("ML efficiency: real test set has no labelled rows");
  const auto truth = endpoint_labels(test, endpoint.label_column);
  return {mcc(truth, model.predict(test)), false};
}

}  // namespace synthcheck
