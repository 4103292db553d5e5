#include "synthcheck/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "synthcheck/association.hpp"
#include "synthcheck/encoding.hpp"
#include "synthcheck/error.hpp"
#include "synthcheck/logistic.hpp"
#include "synthcheck/random.hpp"

namespace synthcheck {

namespace {

void check_shared_schema(const Dataset& real, const Dataset& syn) {
  if (real.cols() != syn.cols()) throw MetricError("real and synthetic datasets have different columns");
  for (std::size_t c = 0; c < real.cols(); ++c) {
    const auto& a = real.column_schema(c);
    const auto& b = syn.column_schema(c);
    if (a.name != b.name || a.kind != b.kind) {
      throw MetricError("schema mismatch at column '" + a.name + "'");
    }
  }
}

std::vector<double> present(std::span<const double> values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) {
    if (!std::isnan(v)) out.push_back(v);
  }
  return out;
}

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;
};

Summary summarize(std::vector<double> v) {
  Summary s;
  const auto n = v.size();
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
  std::sort(v.begin(), v.end());
  s.median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return s;
}

double relative_error(double real, double syn) {
  return std::min(1.0, std::abs(syn - real) / std::max(std::abs(real), 1e-12));
}

const std::string missing_key = "\x01<missing>";

// Category keys for one column: the discrete category, or the equal-width
// bin over the real range for numeric columns.
std::vector<std::string> coverage_keys(const Dataset& ds, std::size_t c, double lo, double hi, std::size_t bins) {
  std::vector<std::string> keys(ds.rows());
  const auto& schema = ds.column_schema(c);
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    if (schema.discrete()) {
      auto cat = ds.category(r, c);
      keys[r] = cat ? *cat : missing_key;
      continue;
    }
    const double v = ds.number(r, c);
    if (std::isnan(v)) {
      keys[r] = missing_key;
      continue;
    }
    std::size_t bin = 0;
    if (hi > lo) {
      const double pos = std::floor((v - lo) / (hi - lo) * static_cast<double>(bins));
      bin = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
    }
    keys[r] = std::to_string(bin);
  }
  return keys;
}

std::map<std::string, double> proportions(const std::vector<std::string>& keys) {
  std::map<std::string, double> p;
  for (const auto& k : keys) p[k] += 1.0;
  for (auto& [k, v] : p) v /= static_cast<double>(keys.size());
  return p;
}

struct ColumnView {
  bool numeric = false;
  std::vector<std::optional<std::string>> categories;
  std::span<const double> values;
};

std::vector<ColumnView> column_views(const Dataset& ds) {
  std::vector<ColumnView> views(ds.cols());
  for (std::size_t c = 0; c < ds.cols(); ++c) {
    auto& v = views[c];
    v.numeric = ds.column_schema(c).numeric();
    if (v.numeric) {
      v.values = ds.numbers(c);
    } else {
      v.categories.resize(ds.rows());
      for (std::size_t r = 0; r < ds.rows(); ++r) v.categories[r] = ds.category(r, c);
    }
  }
  return views;
}

double association(const ColumnView& a, const ColumnView& b) {
  if (a.numeric && b.numeric) {
    try {
      return std::min(1.0, std::abs(pearson_corr(a.values, b.values)));
    } catch (const MetricError&) {
      return 0.0;
    }
  }
  if (a.numeric) return correlation_ratio(b.categories, a.values);
  if (b.numeric) return correlation_ratio(a.categories, b.values);
  return 0.5 * (theils_u(a.categories, b.categories) + theils_u(b.categories, a.categories));
}

// Rows of x in lexicographic order, so that fits seeded from row positions do
// not depend on the input row order.
Eigen::MatrixXd canonical_rows(const Eigen::MatrixXd& x) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (x(a, j) != x(b, j)) return x(a, j) < x(b, j);
    }
    return false;
  });
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (std::size_t i = 0; i < order.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(order[i]);
  return out;
}

double propensity_mse(const Eigen::VectorXd& p, double c) { return (p.array() - c).square().mean(); }

std::size_t get_size(const nlohmann::json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0)) throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
  return j.at(key).get<std::size_t>();
}

double get_double(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

}  // namespace

const std::vector<std::string>& all_metric_names() {
  static const std::vector<std::string> names = {
      metric_names::basic_statistical, metric_names::support_coverage, metric_names::log_correlation,
      metric_names::spmse,             metric_names::kmeans,           metric_names::survival,
      metric_names::ml_efficiency};
  return names;
}

std::optional<double> MetricReport::get(const std::string& name) const {
  for (const auto& v : values) {
    if (v.name == name) return v.value;
  }
  return std::nullopt;
}

void MetricReport::add(const std::string& name, double value) {
  if (get(name)) throw MetricError("duplicate metric '" + name + "' in report");
  values.push_back({name, value});
}

MetricsConfig MetricsConfig::from_json(const nlohmann::json& doc) {
  MetricsConfig cfg;
  reject_unknown(doc, {"spmse", "kmeans", "coverage_bins", "min_correlation"}, "metric config");
  if (doc.contains("spmse")) {
    const auto& s = doc.at("spmse");
    reject_unknown(s, {"alpha", "permutations", "l2_lambda", "max_iterations", "tolerance", "seed"}, "spmse config");
    cfg.spmse.alpha = get_double(s, "alpha", cfg.spmse.alpha);
    cfg.spmse.permutations = get_size(s, "permutations", cfg.spmse.permutations);
    cfg.spmse.l2_lambda = get_double(s, "l2_lambda", cfg.spmse.l2_lambda);
    cfg.spmse.max_iterations = get_size(s, "max_iterations", cfg.spmse.max_iterations);
    cfg.spmse.tolerance = get_double(s, "tolerance", cfg.spmse.tolerance);
    cfg.spmse.seed = get_size(s, "seed", cfg.spmse.seed);
  }
  if (doc.contains("kmeans")) {
    const auto& k = doc.at("kmeans");
    reject_unknown(k, {"k", "restarts", "max_iterations", "seed"}, "kmeans config");
    cfg.kmeans.k = get_size(k, "k", cfg.kmeans.k);
    cfg.kmeans.restarts = get_size(k, "restarts", cfg.kmeans.restarts);
    cfg.kmeans.max_iterations = get_size(k, "max_iterations", cfg.kmeans.max_iterations);
    cfg.kmeans.seed = get_size(k, "seed", cfg.kmeans.seed);
  }
  cfg.coverage_bins = get_size(doc, "coverage_bins", cfg.coverage_bins);
  if (doc.contains("min_correlation") && !doc.at("min_correlation").is_null()) {
    cfg.min_correlation = get_double(doc, "min_correlation", 0.0);
  }

  if (!(cfg.spmse.alpha > 1.0)) throw ConfigError("spmse.alpha must be > 1");
  if (cfg.spmse.permutations < 1) throw ConfigError("spmse.permutations must be >= 1");
  if (!(cfg.spmse.l2_lambda >= 0.0)) throw ConfigError("spmse.l2_lambda must be >= 0");
  if (cfg.kmeans.k < 2) throw ConfigError("kmeans.k must be >= 2");
  if (cfg.kmeans.restarts < 1) throw ConfigError("kmeans.restarts must be >= 1");
  if (cfg.coverage_bins < 2) throw ConfigError("coverage_bins must be >= 2");
  return cfg;
}

nlohmann::json MetricsConfig::to_json() const {
  nlohmann::json j;
  j["spmse"] = {{"alpha", spmse.alpha},         {"permutations", spmse.permutations},
                {"l2_lambda", spmse.l2_lambda}, {"max_iterations", spmse.max_iterations},
                {"tolerance", spmse.tolerance}, {"seed", spmse.seed}};
  j["kmeans"] = {{"k", kmeans.k},
                 {"restarts", kmeans.restarts},
                 {"max_iterations", kmeans.max_iterations},
                 {"seed", kmeans.seed}};
  j["coverage_bins"] = coverage_bins;
  j["min_correlation"] = min_correlation ? nlohmann::json(*min_correlation) : nlohmann::json(nullptr);
  return j;
}

double basic_statistical_measure(const Dataset& real, const Dataset& syn) {
  check_shared_schema(real, syn);
  if (real.empty() || syn.empty()) throw MetricError("basic statistical measure on an empty dataset");
  double total = 0.0;
  std::size_t terms = 0;
  for (std::size_t c = 0; c < real.cols(); ++c) {
    if (!real.column_schema(c).numeric()) continue;
    auto r = present(real.numbers(c));
    auto s = present(syn.numbers(c));
    terms += 3;
    if (r.empty()) continue;
    if (s.empty()) {
      total += 3.0;
      continue;
    }
    const auto a = summarize(std::move(r));
    const auto b = summarize(std::move(s));
    total += relative_error(a.mean, b.mean) + relative_error(a.median, b.median) + relative_error(a.sd, b.sd);
  }
  if (terms == 0) throw MetricError("basic statistical measure needs at least one numeric column");
  return 1.0 - total / static_cast<double>(terms);
}

double regularized_support_coverage(const Dataset& real, const Dataset& syn, std::size_t bins) {
  check_shared_schema(real, syn);
  if (real.empty()) throw MetricError("support coverage on an empty real dataset");
  if (bins < 2) throw MetricError("support coverage needs at least 2 bins");
  double total = 0.0;
  for (std::size_t c = 0; c < real.cols(); ++c) {
    double lo = 0.0;
    double hi = 0.0;
    if (real.column_schema(c).numeric()) {
      const auto r = present(real.numbers(c));
      if (!r.empty()) {
        const auto [mn, mx] = std::minmax_element(r.begin(), r.end());
        lo = *mn;
        hi = *mx;
      }
    }
    const auto p_real = proportions(coverage_keys(real, c, lo, hi, bins));
    const auto p_syn = syn.empty() ? std::map<std::string, double>{} : proportions(coverage_keys(syn, c, lo, hi, bins));
    double column = 0.0;
    for (const auto& [key, pr] : p_real) {
      const auto it = p_syn.find(key);
      const double ps = it == p_syn.end() ? 0.0 : it->second;
      column += std::min(ps / pr, 1.0);
    }
    total += column / static_cast<double>(p_real.size());
  }
  return total / static_cast<double>(real.cols());
}

double column_association(const Dataset& ds, std::size_t a, std::size_t b) {
  const auto views = column_views(ds);
  return association(views.at(a), views.at(b));
}

double log_correlation_pair_score(double a_real, double a_syn) {
  return 1.0 - std::min(1.0, std::abs(std::log1p(a_real) - std::log1p(a_syn)) / std::log(2.0));
}

double log_correlation_score(const Dataset& real, const Dataset& syn, std::optional<double> min_correlation) {
  check_shared_schema(real, syn);
  if (real.cols() < 2) throw MetricError("log-correlation score needs at least two columns");
  const auto rv = column_views(real);
  const auto sv = column_views(syn);
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < real.cols(); ++a) {
    for (std::size_t b = a + 1; b < real.cols(); ++b) {
      const double ar = association(rv[a], rv[b]);
      if (min_correlation && ar < *min_correlation) continue;
      total += log_correlation_pair_score(ar, association(sv[a], sv[b]));
      ++pairs;
    }
  }
  return pairs ? total / static_cast<double>(pairs) : 1.0;
}

double spmse_score(double pmse, double pmse0, double alpha) {
  if (pmse <= alpha * pmse0) return 1.0;
  return std::clamp(alpha * pmse0 / pmse, 0.0, 1.0);
}

PropensityResult spmse_index(const Dataset& real, const Dataset& syn, const SpmseConfig& config) {
  check_shared_schema(real, syn);
  if (real.empty() || syn.empty()) throw MetricError("S_pMSE needs nonempty real and synthetic data");
  if (config.permutations < 1) throw MetricError("S_pMSE needs at least one permutation");

  const auto plan = EncodingPlan::fit(real);
  const Eigen::MatrixXd xr = canonical_rows(plan.transform(real));
  const Eigen::MatrixXd xs = canonical_rows(plan.transform(syn));
  Eigen::MatrixXd x(xr.rows() + xs.rows(), static_cast<Eigen::Index>(plan.width()));
  x << xr, xs;

  bool informative = false;
  for (Eigen::Index j = 0; j < x.cols() && !informative; ++j) {
    informative = (x.col(j).array() != x(0, j)).any();
  }
  if (!informative) throw MetricError("S_pMSE: every encoded feature is constant");

  Eigen::VectorXd y = Eigen::VectorXd::Zero(x.rows());
  y.tail(xs.rows()).setOnes();

  const LogisticOptions options{config.l2_lambda, config.max_iterations, config.tolerance};
  PropensityResult out;
  out.c = static_cast<double>(xs.rows()) / static_cast<double>(x.rows());
  const auto model = fit_logistic(x, y, options);
  out.converged = model.converged;
  out.pmse = propensity_mse(model.predict_proba(x), out.c);

  Rng rng(config.seed);
  double null_total = 0.0;
  for (std::size_t r = 0; r < config.permutations; ++r) {
    Eigen::VectorXd perm = y;
    rng.shuffle(perm.data(), perm.data() + perm.size());
    const auto null_model = fit_logistic(x, perm, options);
    out.converged = out.converged && null_model.converged;
    null_total += propensity_mse(null_model.predict_proba(x), out.c);
  }
  out.pmse0 = null_total / static_cast<double>(config.permutations);
  out.ratio = out.pmse0 > 0.0 ? out.pmse / out.pmse0 : (out.pmse > 0.0 ? INFINITY : 0.0);
  out.score = spmse_score(out.pmse, out.pmse0, config.alpha);
  return out;
}

double cluster_proportion_score(const std::vector<double>& p_real, const std::vector<double>& p_syn) {
  if (p_real.size() != p_syn.size()) throw MetricError("cluster proportion vectors differ in length");
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t j = 0; j < p_real.size(); ++j) {
    if (p_real[j] <= 0.0) continue;
    total += std::min(p_syn[j] / p_real[j], 1.0);
    ++used;
  }
  if (used == 0) throw MetricError("no cluster has real mass");
  return total / static_cast<double>(used);
}

double kmeans_score(const Dataset& real, const Dataset& syn, const KMeansConfig& config) {
  check_shared_schema(real, syn);
  if (real.rows() < config.k) {
    throw MetricError("k-means score: " + std::to_string(real.rows()) + " real rows is fewer than k=" +
                      std::to_string(config.k));
  }
  if (syn.empty()) return 0.0;
  const auto plan = EncodingPlan::fit(real);
  const Eigen::MatrixXd xr = canonical_rows(plan.transform(real));
  const auto model = fit_kmeans(xr, config);
  std::vector<double> p_real(config.k, 0.0);
  std::vector<double> p_syn(config.k, 0.0);
  for (auto l : model.labels) p_real[l] += 1.0 / static_cast<double>(real.rows());
  for (auto l : model.assign(plan.transform(syn))) p_syn[l] += 1.0 / static_cast<double>(syn.rows());
  return cluster_proportion_score(p_real, p_syn);
}

double compound_score(const std::vector<MetricValue>& values, const std::map<std::string, double>& weights) {
  if (values.empty()) throw MetricError("compound score of no metrics");
  std::set<std::string> seen;
  double num = 0.0;
  double den = 0.0;
  for (const auto& v : values) {
    if (!seen.insert(v.name).second) throw MetricError("duplicate metric '" + v.name + "'");
    const auto it = weights.find(v.name);
    if (it == weights.end()) throw MetricError("no weight for metric '" + v.name + "'");
    if (!(it->second >= 0.0)) throw MetricError("negative weight for metric '" + v.name + "'");
    num += it->second * v.value;
    den += it->second;
  }
  if (weights.size() != values.size()) {
    for (const auto& [name, _] : weights) {
      if (!seen.count(name)) throw MetricError("weight given for absent metric '" + name + "'");
    }
  }
  if (!(den > 0.0)) throw MetricError("compound score weights sum to zero");
  return num / den;
}

double compound_score(const std::vector<MetricValue>& values) {
  std::map<std::string, double> weights;
  for (const auto& v : values) weights[v.name] = 1.0;
  if (weights.size() != values.size()) throw MetricError("duplicate metric in compound score");
  return compound_score(values, weights);
}

}  // namespace synthcheck
