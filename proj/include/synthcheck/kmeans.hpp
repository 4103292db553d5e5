#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace synthcheck {

struct KMeansConfig {
  std::size_t k = 10;
  std::size_t restarts = 10;
  std::size_t max_iterations = 300;
  std::uint64_t seed = 0;
};

struct KMeansModel {
  Eigen::MatrixXd centroids;  // k x d
  std::vector<std::size_t> labels;
  double inertia = 0.0;

  /// Nearest centroid per row (ties go to the lower index).
  std::vector<std::size_t> assign(const Eigen::MatrixXd& x) const;
};

/// Lloyd's algorithm with k-means++ seeding; keeps the restart with the
/// lowest inertia. Throws MetricError when x has fewer rows than k.
KMeansModel fit_kmeans(const Eigen::MatrixXd& x, const KMeansConfig& config);

}  // namespace synthcheck
