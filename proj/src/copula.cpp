#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include <boost/math/special_functions/erf.hpp>

#include "synthcheck/association.hpp"
#include "synthcheck/error.hpp"
#include "synthcheck/generators.hpp"
#include "synthcheck/random.hpp"

namespace synthcheck {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw MetricError("normal quantile outside (0, 1)");
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

void CopulaParams::check() const {
  if (!(correlation_shrinkage >= 0.0 && correlation_shrinkage <= 1.0)) {
    throw ConfigError("correlation_shrinkage must lie in [0, 1]");
  }
  if (marginal_bins < 2) throw ConfigError("marginal_bins must be >= 2");
  if (!(jitter >= 0.0) || !std::isfinite(jitter)) throw ConfigError("jitter must be >= 0");
  if (!(category_smoothing >= 0.0) || !std::isfinite(category_smoothing)) {
    throw ConfigError("category_smoothing must be >= 0");
  }
}

nlohmann::json CopulaParams::to_json() const {
  return {{"correlation_shrinkage", correlation_shrinkage},
          {"marginal_bins", marginal_bins},
          {"jitter", jitter},
          {"category_smoothing", category_smoothing}};
}

CopulaParams CopulaParams::from_json(const nlohmann::json& hp) {
  CopulaParams p;
  if (hp.is_null()) return p;
  if (!hp.is_object()) throw ConfigError("copula hyperparameters must be a JSON object");
  for (const auto& [key, value] : hp.items()) {
    if (!value.is_number()) throw ConfigError("copula hyperparameter '" + key + "' must be numeric");
    if (key == "correlation_shrinkage") {
      p.correlation_shrinkage = value.get<double>();
    } else if (key == "marginal_bins") {
      const double b = value.get<double>();
      if (b != std::floor(b) || b < 0) throw ConfigError("marginal_bins must be an integer");
      p.marginal_bins = static_cast<std::size_t>(b);
    } else if (key == "jitter") {
      p.jitter = value.get<double>();
    } else if (key == "category_smoothing") {
      p.category_smoothing = value.get<double>();
    } else {
      throw ConfigError("unknown copula hyperparameter '" + key + "'");
    }
  }
  p.check();
  return p;
}

namespace {

// Numeric order when every level parses as a number, otherwise lexicographic.
void order_levels(std::vector<std::string>& levels) {
  std::vector<std::pair<double, std::string>> keyed;
  for (const auto& l : levels) {
    double v = 0.0;
    const auto res = std::from_chars(l.data(), l.data() + l.size(), v);
    if (res.ec != std::errc() || res.ptr != l.data() + l.size()) {
      std::sort(levels.begin(), levels.end());
      return;
    }
    keyed.emplace_back(v, l);
  }
  std::sort(keyed.begin(), keyed.end());
  for (std::size_t i = 0; i < keyed.size(); ++i) levels[i] = keyed[i].second;
}

double interpolate(const std::vector<double>& knots, double u) {
  const double pos = std::clamp(u, 0.0, 1.0) * static_cast<double>(knots.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), knots.size() - 2);
  const double frac = pos - static_cast<double>(i);
  return knots[i] + frac * (knots[i + 1] - knots[i]);
}

Eigen::MatrixXd nearest_correlation(const Eigen::MatrixXd& r) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r);
  Eigen::VectorXd d = eig.eigenvalues().cwiseMax(1e-10);
  Eigen::MatrixXd fixed = eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
  const Eigen::VectorXd s = fixed.diagonal().cwiseSqrt().cwiseInverse();
  return s.asDiagonal() * fixed * s.asDiagonal();
}

}  // namespace

CopulaModel CopulaModel::fit(const Dataset& train, const CopulaParams& params) {
  params.check();
  if (train.empty()) throw GeneratorError("copula: empty training data");
  const std::size_t n = train.rows();
  const std::size_t p = train.cols();
  const auto bins = params.marginal_bins;

  CopulaModel model;
  model.schema_ = train.schema();
  model.marginals_.resize(p);
  Eigen::MatrixXd z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));

  for (std::size_t c = 0; c < p; ++c) {
    auto& m = model.marginals_[c];
    const auto& schema = train.column_schema(c);
    std::vector<double> keys(n);
    if (schema.numeric()) {
      m.numeric = true;
      std::vector<double> v;
      for (std::size_t r = 0; r < n; ++r) {
        const double x = train.number(r, c);
        keys[r] = std::isnan(x) ? -INFINITY : x;
        if (!std::isnan(x)) v.push_back(x);
      }
      m.missing_mass = static_cast<double>(n - v.size()) / static_cast<double>(n);
      std::sort(v.begin(), v.end());
      if (!v.empty()) {
        for (std::size_t i = 0; i <= bins; ++i) {
          const double pos = static_cast<double>(i) / static_cast<double>(bins) * static_cast<double>(v.size() - 1);
          const auto lo = static_cast<std::size_t>(pos);
          const auto hi = std::min(lo + 1, v.size() - 1);
          m.knots.push_back(v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]));
        }
        // Noise is a fraction of the column's standard deviation.
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
        m.noise_sd = params.jitter * sd;
      }
    } else {
      std::map<std::string, std::size_t> counts;
      std::size_t missing = 0;
      for (std::size_t r = 0; r < n; ++r) {
        if (auto cat = train.category(r, c)) {
          ++counts[*cat];
        } else {
          ++missing;
        }
      }
      for (const auto& [level, _] : counts) m.levels.push_back(level);
      order_levels(m.levels);
      m.has_missing_level = missing > 0;
      std::vector<double> mass;
      if (m.has_missing_level) mass.push_back(static_cast<double>(missing));
      for (const auto& l : m.levels) mass.push_back(static_cast<double>(counts[l]));
      const double total = static_cast<double>(n) + params.category_smoothing * static_cast<double>(mass.size());
      double acc = 0.0;
      for (double w : mass) {
        acc += (w + params.category_smoothing) / total;
        m.cumulative.push_back(acc);
      }
      m.cumulative.back() = 1.0;
      std::map<std::string, double> position;
      for (std::size_t i = 0; i < m.levels.size(); ++i) position[m.levels[i]] = static_cast<double>(i);
      for (std::size_t r = 0; r < n; ++r) {
        const auto cat = train.category(r, c);
        keys[r] = cat ? position[*cat] : -1.0;
      }
    }
    const auto ranks = average_ranks(keys);
    for (std::size_t r = 0; r < n; ++r) {
      z(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          normal_quantile(ranks[r] / static_cast<double>(n + 1));
    }
  }

  model.empirical_ = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  if (n >= 2) {
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = a + 1; b < p; ++b) {
        const auto ca = z.col(static_cast<Eigen::Index>(a));
        const auto cb = z.col(static_cast<Eigen::Index>(b));
        const double r = pearson_corr(std::span<const double>(ca.data(), n), std::span<const double>(cb.data(), n));
        model.empirical_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = r;
        model.empirical_(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = r;
      }
    }
  }
  const double lambda = params.correlation_shrinkage;
  model.correlation_ = (1.0 - lambda) * model.empirical_ +
                       lambda * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  Eigen::LLT<Eigen::MatrixXd> llt(model.correlation_);
  if (llt.info() != Eigen::Success) {
    model.correlation_ = nearest_correlation(model.correlation_);
    llt.compute(model.correlation_);
  }
  model.cholesky_ = llt.matrixL();
  return model;
}

Cell CopulaModel::draw(const Marginal& m, const ColumnSchema& schema, double u, double noise) const {
  if (m.numeric) {
    if (m.knots.empty() || u < m.missing_mass) return std::monostate{};
    const double scaled = (u - m.missing_mass) / (1.0 - m.missing_mass);
    double x = interpolate(m.knots, scaled) + noise * m.noise_sd;
    if (schema.kind == ColumnKind::integer) x = std::round(x) + 0.0;
    return x;
  }
  const auto it = std::lower_bound(m.cumulative.begin(), m.cumulative.end(), u);
  auto idx = static_cast<std::size_t>(it - m.cumulative.begin());
  idx = std::min(idx, m.cumulative.size() - 1);
  if (m.has_missing_level) {
    if (idx == 0) return std::monostate{};
    --idx;
  }
  const auto& level = m.levels[idx];
  if (schema.kind == ColumnKind::binary) return level == "1" ? 1.0 : 0.0;
  return level;
}

Dataset CopulaModel::sample(std::size_t n, std::uint64_t seed) const {
  if (n < 1) throw GeneratorError("copula: sample size must be >= 1");
  const auto p = static_cast<Eigen::Index>(schema_.size());
  Rng rng(seed);
  Dataset out(schema_);
  Eigen::VectorXd eps(p);
  std::vector<Cell> row(schema_.size());
  for (std::size_t r = 0; r < n; ++r) {
    for (Eigen::Index j = 0; j < p; ++j) eps[j] = rng.normal();
    const Eigen::VectorXd z = cholesky_ * eps;
    for (Eigen::Index j = 0; j < p; ++j) {
      const auto c = static_cast<std::size_t>(j);
      const double u = std::clamp(normal_cdf(z[j]), 1e-12, 1.0 - 1e-12);
      const double noise = marginals_[c].numeric ? rng.normal() : 0.0;
      row[c] = draw(marginals_[c], schema_[c], u, noise);
    }
    out.add_row(row);
  }
  return out;
}

Dataset CopulaGenerator::fit_sample(const Dataset& train, const nlohmann::json& hyperparameters, std::size_t n,
                                    std::uint64_t train_seed, std::uint64_t sample_seed) {
  const auto model = CopulaModel::fit(train, CopulaParams::from_json(hyperparameters));
  return model.sample(n, mix_seed(train_seed, sample_seed));
}

}  // namespace synthcheck
