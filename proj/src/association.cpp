#include "synthcheck/association.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "synthcheck/error.hpp"

namespace synthcheck {

namespace {

double entropy_of_counts(const std::map<std::string, double>& counts, double total) {
  double h = 0.0;
  for (const auto& [key, n] : counts) {
    if (n <= 0.0) continue;
    const double p = n / total;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double pearson_corr(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw MetricError("pearson_corr: length mismatch");
  double sx = 0.0, sy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    sx += x[i];
    sy += y[i];
    ++n;
  }
  if (n < 2) throw MetricError("pearson_corr: fewer than 2 complete pairs");
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double correlation_ratio(std::span<const std::optional<std::string>> categories,
                         std::span<const double> values) {
  if (categories.size() != values.size()) throw MetricError("correlation_ratio: length mismatch");
  std::map<std::string, std::pair<double, std::size_t>> groups;
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!categories[i] || std::isnan(values[i])) continue;
    auto& g = groups[*categories[i]];
    g.first += values[i];
    ++g.second;
    total += values[i];
    ++n;
  }
  if (n < 2) return 0.0;
  const double mean = total / static_cast<double>(n);
  double ss_total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!categories[i] || std::isnan(values[i])) continue;
    ss_total += (values[i] - mean) * (values[i] - mean);
  }
  if (ss_total <= 0.0) return 0.0;
  double ss_between = 0.0;
  for (const auto& [key, g] : groups) {
    const double gm = g.first / static_cast<double>(g.second);
    ss_between += static_cast<double>(g.second) * (gm - mean) * (gm - mean);
  }
  return std::clamp(std::sqrt(ss_between / ss_total), 0.0, 1.0);
}

double theils_u(std::span<const std::optional<std::string>> x,
                std::span<const std::optional<std::string>> y) {
  if (x.size() != y.size()) throw MetricError("theils_u: length mismatch");
  std::map<std::string, double> x_counts;
  std::map<std::string, double> y_counts;
  std::map<std::string, std::map<std::string, double>> joint;  // y -> x -> count
  double n = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!x[i] || !y[i]) continue;
    x_counts[*x[i]] += 1.0;
    y_counts[*y[i]] += 1.0;
    joint[*y[i]][*x[i]] += 1.0;
    n += 1.0;
  }
  if (n == 0.0) return 0.0;
  const double hx = entropy_of_counts(x_counts, n);
  if (hx <= 0.0) return 0.0;
  double hx_given_y = 0.0;
  for (const auto& [yk, xs] : joint) {
    const double ny = y_counts[yk];
    hx_given_y += (ny / n) * entropy_of_counts(xs, ny);
  }
  return std::clamp((hx - hx_given_y) / hx, 0.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman_corr(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw MetricError("spearman_corr: length mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    xs.push_back(x[i]);
    ys.push_back(y[i]);
  }
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  return pearson_corr(rx, ry);
}

}  // namespace synthcheck
