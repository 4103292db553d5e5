#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace synthcheck {

struct GbdtParams {
  std::size_t n_trees = 100;
  std::size_t max_depth = 3;
  double learning_rate = 0.1;
  std::size_t min_samples_leaf = 5;
  double subsample = 1.0;
  double l2_leaf = 1.0;
  std::size_t max_bins = 255;
  std::uint64_t seed = 0;
};

struct GbdtNode {
  // Leaf when feature < 0.
  int feature = -1;
  double threshold = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  double value = 0.0;
};

/// Binary log-loss gradient boosting with second-order leaf values and
/// histogram split search.
class GbdtClassifier {
 public:
  static GbdtClassifier fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const GbdtParams& params);

  /// P(y = 1) per row.
  Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x) const;

  std::size_t tree_count() const noexcept { return trees_.size(); }

 private:
  using Tree = std::vector<GbdtNode>;

  double raw_score(const Eigen::MatrixXd& x, Eigen::Index row) const;

  double base_score_ = 0.0;
  std::vector<Tree> trees_;
};

}  // namespace synthcheck
