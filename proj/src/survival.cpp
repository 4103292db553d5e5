#include "synthcheck/survival.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "synthcheck/error.hpp"

namespace synthcheck {

double KMCurve::at(double t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 1.0;
  return surv[static_cast<std::size_t>(it - times.begin()) - 1];
}

KMCurve km_estimate(std::span<const double> times, std::span<const double> events) {
  if (times.size() != events.size()) throw MetricError("Kaplan-Meier: times and events differ in length");
  if (times.empty()) throw MetricError("Kaplan-Meier on empty input");
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) throw MetricError("Kaplan-Meier: non-finite time");
    if (times[i] < 0.0) throw MetricError("Kaplan-Meier: negative time");
    if (events[i] != 0.0 && events[i] != 1.0) throw MetricError("Kaplan-Meier: event indicator must be 0 or 1");
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  KMCurve curve;
  curve.max_observed_time = times[order.back()];
  double s = 1.0;
  std::size_t at_risk = times.size();
  std::size_t i = 0;
  while (i < order.size()) {
    const double t = times[order[i]];
    std::size_t deaths = 0;
    std::size_t total = 0;
    while (i < order.size() && times[order[i]] == t) {
      deaths += events[order[i]] == 1.0 ? 1 : 0;
      ++total;
      ++i;
    }
    if (deaths > 0) {
      s *= 1.0 - static_cast<double>(deaths) / static_cast<double>(at_risk);
      curve.times.push_back(t);
      curve.surv.push_back(s);
      curve.n_at_risk.push_back(at_risk);
    }
    at_risk -= total;
  }
  return curve;
}

std::vector<double> comparison_grid(const KMCurve& real, const KMCurve& syn) {
  const double horizon = std::min(real.max_observed_time, syn.max_observed_time);
  std::vector<double> grid;
  std::set_union(real.times.begin(), real.times.end(), syn.times.begin(), syn.times.end(),
                 std::back_inserter(grid));
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  grid.erase(std::upper_bound(grid.begin(), grid.end(), horizon), grid.end());
  return grid;
}

namespace {

template <class F>
CurveComparison grid_mean(const KMCurve& real, const KMCurve& syn, F term) {
  const auto grid = comparison_grid(real, syn);
  CurveComparison out;
  if (grid.empty()) {
    out.empty_grid = true;
    out.raw = 0.0;
    return out;
  }
  double total = 0.0;
  for (double t : grid) total += term(syn.at(t) - real.at(t));
  out.raw = total / static_cast<double>(grid.size());
  return out;
}

}  // namespace

CurveComparison km_divergence(const KMCurve& real, const KMCurve& syn) {
  auto out = grid_mean(real, syn, [](double d) { return std::abs(d); });
  out.score = 1.0 - out.raw;
  return out;
}

CurveComparison optimism(const KMCurve& real, const KMCurve& syn) {
  auto out = grid_mean(real, syn, [](double d) { return d; });
  out.score = 1.0 - std::abs(out.raw);
  return out;
}

CurveComparison short_sightedness(const KMCurve& real, const KMCurve& syn) {
  if (!(real.max_observed_time > 0.0)) throw MetricError("short-sightedness: real horizon is 0");
  CurveComparison out;
  out.raw = std::max(0.0, (real.max_observed_time - syn.max_observed_time) / real.max_observed_time);
  out.raw = std::min(out.raw, 1.0);
  out.score = 1.0 - out.raw;
  return out;
}

SurvivalScores combine_survival(const KMCurve& real, const KMCurve& syn) {
  SurvivalScores s;
  const auto opt = optimism(real, syn);
  const auto div = km_divergence(real, syn);
  const auto sh = short_sightedness(real, syn);
  s.optimism_raw = opt.raw;
  s.optimism_score = opt.score;
  s.divergence_raw = div.raw;
  s.divergence_score = div.score;
  s.shortsight_raw = sh.raw;
  s.shortsight_score = sh.score;
  s.empty_grid = opt.empty_grid;
  s.survival_metric = (s.optimism_score + s.shortsight_score + s.divergence_score) / 3.0;
  return s;
}

SurvivalScores survival_metric(const Dataset& real, const Dataset& syn, const SurvivalColumns& sc) {
  const auto extract = [&](const Dataset& ds, bool strict, std::size_t& excluded) {
    const auto tc = ds.index_of(sc.ostm);
    const auto ec = ds.index_of(sc.osstat);
    std::vector<double> t;
    std::vector<double> e;
    for (std::size_t r = 0; r < ds.rows(); ++r) {
      const double time = ds.number(r, tc);
      const double status = ds.number(r, ec);
      const bool usable = std::isfinite(time) && time >= 0.0 && (status == 0.0 || status == 1.0);
      if (!usable) {
        if (strict) throw MetricError("survival metric: real data row " + std::to_string(r + 1) +
                                      " has an unusable survival time or status");
        ++excluded;
        continue;
      }
      t.push_back(time);
      e.push_back(status);
    }
    return std::pair{t, e};
  };

  std::size_t excluded = 0;
  const auto [rt, re] = extract(real, true, excluded);
  if (rt.empty()) throw MetricError("survival metric: real data is empty");
  const auto real_curve = km_estimate(rt, re);
  if (!(real_curve.max_observed_time > 0.0)) throw MetricError("survival metric: real times are all 0");

  excluded = 0;
  const auto [st, se] = extract(syn, false, excluded);
  if (st.empty()) {
    SurvivalScores zero;
    zero.optimism_raw = -1.0;
    zero.shortsight_raw = 1.0;
    zero.divergence_raw = 1.0;
    zero.excluded_rows = excluded;
    return zero;
  }
  auto scores = combine_survival(real_curve, km_estimate(st, se));
  scores.excluded_rows = excluded;
  return scores;
}

}  // namespace synthcheck
