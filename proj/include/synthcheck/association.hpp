#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace synthcheck {

/// Sample Pearson correlation after pairwise deletion of NaN entries.
/// A constant series yields 0. Throws MetricError with fewer than two
/// complete pairs or on length mismatch.
double pearson_corr(std::span<const double> x, std::span<const double> y);

/// Correlation ratio eta = sqrt(SS_between / SS_total) of a numeric series
/// grouped by a categorical one. Missing entries (nullopt / NaN) are dropped
/// pairwise; zero total variance yields 0.
double correlation_ratio(std::span<const std::optional<std::string>> categories,
                         std::span<const double> values);

/// Uncertainty coefficient U(X|Y) = (H(X) - H(X|Y)) / H(X). H(X) = 0 yields 0.
double theils_u(std::span<const std::optional<std::string>> x,
                std::span<const std::optional<std::string>> y);

/// Spearman rank correlation (average ranks for ties).
double spearman_corr(std::span<const double> x, std::span<const double> y);

/// Average ranks (1-based) with ties sharing the mean rank.
std::vector<double> average_ranks(std::span<const double> values);

}  // namespace synthcheck
