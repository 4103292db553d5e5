#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "synthcheck/dataset.hpp"

namespace synthcheck {

/// Column encoders fitted on a reference (real) dataset only: one-hot for
/// binary/categorical columns, z-scores for numeric columns.
///
/// Missing values: a discrete column that had missing cells in the reference
/// gets a dedicated "missing" indicator; numeric missing cells are imputed
/// with the reference mean (z = 0). Levels never seen in the reference encode
/// as all-zero indicators.
class EncodingPlan {
 public:
  static EncodingPlan fit(const Dataset& reference, std::span<const std::string> exclude = {});

  std::size_t width() const noexcept { return width_; }
  std::vector<std::string> feature_names() const;

  /// rows x width design matrix. Columns are located by name.
  Eigen::MatrixXd transform(const Dataset& ds) const;

 private:
  struct Encoder {
    std::string name;
    bool numeric = false;
    double mean = 0.0;
    double scale = 1.0;
    std::vector<std::string> levels;
    bool missing_level = false;
    std::size_t offset = 0;
  };

  std::vector<Encoder> encoders_;
  std::size_t width_ = 0;
};

}  // namespace synthcheck
