#include "synthcheck/logistic.hpp"

#include <algorithm>
#include <cmath>

#include "synthcheck/error.hpp"

namespace synthcheck {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct Objective {
  const Eigen::MatrixXd& x;  // with trailing intercept column
  const Eigen::VectorXd& y;
  double lambda;

  double value(const Eigen::VectorXd& beta) const {
    const Eigen::VectorXd eta = x * beta;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) loss += softplus(eta[i]) - y[i] * eta[i];
    const auto p = beta.size() - 1;
    return loss / static_cast<double>(eta.size()) + 0.5 * lambda * beta.head(p).squaredNorm();
  }
};

}  // namespace

Eigen::VectorXd LogisticModel::predict_proba(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd eta = x * weights;
  for (Eigen::Index i = 0; i < eta.size(); ++i) eta[i] = sigmoid(eta[i] + intercept);
  return eta;
}

LogisticModel fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LogisticOptions& options) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (n == 0) throw MetricError("logistic regression on empty data");
  if (y.size() != n) throw MetricError("logistic regression: label length mismatch");

  Eigen::MatrixXd xa(n, p + 1);
  xa.leftCols(p) = x;
  xa.col(p).setOnes();

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p + 1);
  const double ybar = std::clamp(y.mean(), 1e-6, 1.0 - 1e-6);
  beta[p] = std::log(ybar / (1.0 - ybar));

  const Objective objective{xa, y, options.l2_lambda};
  const double inv_n = 1.0 / static_cast<double>(n);
  double f = objective.value(beta);

  LogisticModel model;
  Eigen::VectorXd prob(n);
  Eigen::VectorXd w(n);
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    const Eigen::VectorXd eta = xa * beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      prob[i] = sigmoid(eta[i]);
      w[i] = prob[i] * (1.0 - prob[i]);
    }
    Eigen::VectorXd grad = xa.transpose() * (prob - y) * inv_n;
    grad.head(p) += options.l2_lambda * beta.head(p);
    model.iterations = iter;
    if (grad.cwiseAbs().maxCoeff() <= options.tolerance) {
      model.converged = true;
      break;
    }
    Eigen::MatrixXd hess = xa.transpose() * w.asDiagonal() * xa * inv_n;
    hess.diagonal().head(p).array() += options.l2_lambda;
    // Tiny ridge on the intercept keeps the system solvable when every
    // propensity saturates.
    hess(p, p) += 1e-12;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    Eigen::VectorXd step = ldlt.solve(-grad);
    if (!step.allFinite()) step = -grad;

    // Backtracking line search on the penalised objective.
    double t = 1.0;
    const double slope = grad.dot(step);
    Eigen::VectorXd candidate = beta + step;
    double f_new = objective.value(candidate);
    while (f_new > f + 1e-4 * t * slope && t > 1e-10) {
      t *= 0.5;
      candidate = beta + t * step;
      f_new = objective.value(candidate);
    }
    const bool stalled = (candidate - beta).cwiseAbs().maxCoeff() <= 1e-14;
    beta = candidate;
    f = f_new;
    model.iterations = iter + 1;
    if (stalled) {
      // No further progress possible in floating point.
      model.converged = grad.cwiseAbs().maxCoeff() <= std::sqrt(options.tolerance);
      break;
    }
  }
  model.weights = beta.head(p);
  model.intercept = beta[p];
  return model;
}

}  // namespace synthcheck
