#include "synthcheck/kmeans.hpp"

#include <limits>

#include "synthcheck/error.hpp"
#include "synthcheck/random.hpp"

namespace synthcheck {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double squared_distance(const RowMatrix& x, Eigen::Index i, const RowMatrix& c, Eigen::Index j) {
  double d = 0.0;
  const double* a = x.row(i).data();
  const double* b = c.row(j).data();
  for (Eigen::Index t = 0; t < x.cols(); ++t) {
    const double diff = a[t] - b[t];
    d += diff * diff;
  }
  return d;
}

std::size_t nearest(const RowMatrix& x, Eigen::Index i, const RowMatrix& c, double* best_out) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < c.rows(); ++j) {
    const double d = squared_distance(x, i, c, j);
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(j);
    }
  }
  if (best_out) *best_out = best_d;
  return best;
}

RowMatrix seed_plus_plus(const RowMatrix& x, std::size_t k, Rng& rng) {
  const auto n = x.rows();
  RowMatrix centers(static_cast<Eigen::Index>(k), x.cols());
  centers.row(0) = x.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n))));
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  for (std::size_t m = 1; m < k; ++m) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = squared_distance(x, i, centers, static_cast<Eigen::Index>(m - 1));
      auto& slot = d2[static_cast<std::size_t>(i)];
      if (d < slot) slot = d;
      total += slot;
    }
    Eigen::Index pick = 0;
    if (total <= 0.0) {
      pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
    } else {
      double target = rng.uniform() * total;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= d2[static_cast<std::size_t>(i)];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    }
    centers.row(static_cast<Eigen::Index>(m)) = x.row(pick);
  }
  return centers;
}

}  // namespace

std::vector<std::size_t> KMeansModel::assign(const Eigen::MatrixXd& x) const {
  const RowMatrix xr = x;
  const RowMatrix cr = centroids;
  std::vector<std::size_t> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = nearest(xr, i, cr, nullptr);
  return out;
}

KMeansModel fit_kmeans(const Eigen::MatrixXd& x, const KMeansConfig& config) {
  if (config.k < 2) throw MetricError("k-means needs k >= 2");
  if (static_cast<std::size_t>(x.rows()) < config.k) {
    throw MetricError("k-means: " + std::to_string(x.rows()) + " rows is fewer than k=" + std::to_string(config.k));
  }
  const RowMatrix xr = x;
  const auto n = xr.rows();
  const auto k = static_cast<Eigen::Index>(config.k);
  Rng rng(config.seed);

  KMeansModel best;
  best.inertia = std::numeric_limits<double>::infinity();
  const std::size_t restarts = std::max<std::size_t>(1, config.restarts);
  for (std::size_t run = 0; run < restarts; ++run) {
    RowMatrix centers = seed_plus_plus(xr, config.k, rng);
    std::vector<std::size_t> labels(static_cast<std::size_t>(n), config.k);
    std::vector<double> dist(static_cast<std::size_t>(n), 0.0);
    for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
      bool changed = false;
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto l = nearest(xr, i, centers, &dist[static_cast<std::size_t>(i)]);
        if (l != labels[static_cast<std::size_t>(i)]) {
          labels[static_cast<std::size_t>(i)] = l;
          changed = true;
        }
      }
      if (!changed) break;
      RowMatrix sums = RowMatrix::Zero(k, xr.cols());
      std::vector<std::size_t> counts(config.k, 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto l = labels[static_cast<std::size_t>(i)];
        sums.row(static_cast<Eigen::Index>(l)) += xr.row(i);
        ++counts[l];
      }
      for (Eigen::Index j = 0; j < k; ++j) {
        const auto cnt = counts[static_cast<std::size_t>(j)];
        if (cnt > 0) {
          centers.row(j) = sums.row(j) / static_cast<double>(cnt);
          continue;
        }
        // Empty cluster: move it onto the point farthest from its centroid.
        Eigen::Index far = 0;
        for (Eigen::Index i = 1; i < n; ++i) {
          if (dist[static_cast<std::size_t>(i)] > dist[static_cast<std::size_t>(far)]) far = i;
        }
        centers.row(j) = xr.row(far);
        dist[static_cast<std::size_t>(far)] = 0.0;
      }
    }
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double d = 0.0;
      labels[static_cast<std::size_t>(i)] = nearest(xr, i, centers, &d);
      inertia += d;
    }
    if (inertia < best.inertia) {
      best.inertia = inertia;
      best.centroids = centers;
      best.labels = labels;
    }
  }
  return best;
}

}  // namespace synthcheck
