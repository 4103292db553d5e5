#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace synthcheck {

struct LogisticOptions {
  double l2_lambda = 1e-4;
  std::size_t max_iterations = 1000;
  double tolerance = 1e-8;
};

struct LogisticModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  std::size_t iterations = 0;
  bool converged = false;

  Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x) const;
};

/// Ridge-penalised logistic regression (intercept unpenalised), minimising
/// mean log-loss + lambda/2 * |w|^2 by damped Newton iterations. Stops when
/// the largest gradient component falls below tolerance; otherwise returns
/// the last iterate with converged = false.
LogisticModel fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           const LogisticOptions& options = {});

}  // namespace synthcheck
