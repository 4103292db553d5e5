#include "synthcheck/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "synthcheck/error.hpp"
#include "synthcheck/random.hpp"

namespace synthcheck {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Cut points per feature. A value v falls in bin lower_bound(cuts, v), so
// splitting after bin b sends v <= cuts[b] left.
struct Binning {
  std::vector<std::vector<double>> cuts;
  std::vector<std::uint16_t> codes;  // column-major n x features
  std::size_t rows = 0;

  std::uint16_t code(std::size_t row, std::size_t feature) const { return codes[feature * rows + row]; }
};

Binning make_bins(const Eigen::MatrixXd& x, std::size_t max_bins) {
  Binning b;
  b.rows = static_cast<std::size_t>(x.rows());
  const auto features = static_cast<std::size_t>(x.cols());
  b.cuts.resize(features);
  b.codes.resize(b.rows * features);
  std::vector<double> sorted(b.rows);
  for (std::size_t j = 0; j < features; ++j) {
    for (std::size_t i = 0; i < b.rows; ++i) sorted[i] = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> unique_values = sorted;
    unique_values.erase(std::unique(unique_values.begin(), unique_values.end()), unique_values.end());
    auto& cuts = b.cuts[j];
    if (unique_values.size() <= max_bins) {
      cuts.assign(unique_values.begin(), unique_values.end() - (unique_values.empty() ? 0 : 1));
    } else {
      for (std::size_t q = 1; q < max_bins; ++q) {
        const auto pos = q * b.rows / max_bins;
        cuts.push_back(sorted[std::min(pos, b.rows - 1)]);
      }
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      if (!cuts.empty() && cuts.back() >= unique_values.back()) cuts.pop_back();
    }
    for (std::size_t i = 0; i < b.rows; ++i) {
      const double v = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      b.codes[j * b.rows + i] = static_cast<std::uint16_t>(std::lower_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
    }
  }
  return b;
}

struct Builder {
  const Binning& bins;
  const std::vector<double>& grad;
  const std::vector<double>& hess;
  const GbdtParams& params;

  struct Split {
    double gain = 0.0;
    int feature = -1;
    std::size_t bin = 0;
  };

  Split best_split(const std::vector<std::size_t>& rows, double g, double h) const {
    Split best;
    const double parent = g * g / (h + params.l2_leaf);
    std::vector<double> hg;
    std::vector<double> hh;
    std::vector<std::size_t> hc;
    for (std::size_t j = 0; j < bins.cuts.size(); ++j) {
      const auto n_bins = bins.cuts[j].size() + 1;
      if (n_bins < 2) continue;
      hg.assign(n_bins, 0.0);
      hh.assign(n_bins, 0.0);
      hc.assign(n_bins, 0);
      for (auto r : rows) {
        const auto c = bins.code(r, j);
        hg[c] += grad[r];
        hh[c] += hess[r];
        ++hc[c];
      }
      double gl = 0.0;
      double hl = 0.0;
      std::size_t cl = 0;
      for (std::size_t b = 0; b + 1 < n_bins; ++b) {
        gl += hg[b];
        hl += hh[b];
        cl += hc[b];
        const auto cr = rows.size() - cl;
        if (cl < params.min_samples_leaf) continue;
        if (cr < params.min_samples_leaf) break;
        const double gr = g - gl;
        const double hr = h - hl;
        const double gain = gl * gl / (hl + params.l2_leaf) + gr * gr / (hr + params.l2_leaf) - parent;
        if (gain > best.gain + 1e-12) {
          best.gain = gain;
          best.feature = static_cast<int>(j);
          best.bin = b;
        }
      }
    }
    return best;
  }

  std::size_t build(std::vector<std::size_t>& rows, std::size_t depth, std::vector<GbdtNode>& tree) const {
    const std::size_t id = tree.size();
    tree.emplace_back();
    double g = 0.0;
    double h = 0.0;
    for (auto r : rows) {
      g += grad[r];
      h += hess[r];
    }
    tree[id].value = -params.learning_rate * g / (h + params.l2_leaf);
    if (depth >= params.max_depth || rows.size() < 2 * std::max<std::size_t>(1, params.min_samples_leaf)) return id;
    const auto split = best_split(rows, g, h);
    if (split.feature < 0) return id;

    const auto f = static_cast<std::size_t>(split.feature);
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (auto r : rows) (bins.code(r, f) <= split.bin ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    tree[id].feature = split.feature;
    tree[id].threshold = bins.cuts[f][split.bin];
    const auto l = build(left, depth + 1, tree);
    const auto rgt = build(right, depth + 1, tree);
    tree[id].left = l;
    tree[id].right = rgt;
    return id;
  }
};

}  // namespace

GbdtClassifier GbdtClassifier::fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const GbdtParams& params) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (n == 0) throw MetricError("boosted trees: empty training data");
  if (static_cast<std::size_t>(y.size()) != n) throw MetricError("boosted trees: label length mismatch");
  if (params.n_trees < 1) throw MetricError("boosted trees: n_trees must be >= 1");
  if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0)) {
    throw MetricError("boosted trees: learning_rate must lie in (0, 1]");
  }
  if (!(params.subsample > 0.0 && params.subsample <= 1.0)) {
    throw MetricError("boosted trees: subsample must lie in (0, 1]");
  }

  GbdtClassifier model;
  const double p0 = std::clamp(y.mean(), 1e-6, 1.0 - 1e-6);
  model.base_score_ = std::log(p0 / (1.0 - p0));

  const auto bins = make_bins(x, std::clamp<std::size_t>(params.max_bins, 2, 65535));
  std::vector<double> raw(n, model.base_score_);
  std::vector<double> grad(n, 0.0);
  std::vector<double> hess(n, 0.0);
  const Builder builder{bins, grad, hess, params};
  Rng rng(params.seed);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto take = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(params.subsample * static_cast<double>(n))));

  for (std::size_t t = 0; t < params.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(raw[i]);
      grad[i] = p - y[static_cast<Eigen::Index>(i)];
      hess[i] = std::max(p * (1.0 - p), 1e-16);
    }
    std::vector<std::size_t> rows;
    if (take < n) {
      // Partial Fisher-Yates draw without replacement, then restore row order.
      std::vector<std::size_t> pool = all;
      for (std::size_t i = 0; i < take; ++i) std::swap(pool[i], pool[i + rng.index(n - i)]);
      rows.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
      std::sort(rows.begin(), rows.end());
    } else {
      rows = all;
    }
    Tree tree;
    builder.build(rows, 0, tree);
    model.trees_.push_back(std::move(tree));
    const auto& fitted = model.trees_.back();
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      std::size_t node = 0;
      while (fitted[node].feature >= 0) {
        node = x(row, fitted[node].feature) <= fitted[node].threshold ? fitted[node].left : fitted[node].right;
      }
      raw[i] += fitted[node].value;
    }
  }
  return model;
}

double GbdtClassifier::raw_score(const Eigen::MatrixXd& x, Eigen::Index row) const {
  double score = base_score_;
  for (const auto& tree : trees_) {
    std::size_t node = 0;
    while (tree[node].feature >= 0) {
      node = x(row, tree[node].feature) <= tree[node].threshold ? tree[node].left : tree[node].right;
    }
    score += tree[node].value;
  }
  return score;
}

Eigen::VectorXd GbdtClassifier::predict_proba(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = sigmoid(raw_score(x, i));
  return out;
}

}  // namespace synthcheck
