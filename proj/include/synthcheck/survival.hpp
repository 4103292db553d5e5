#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "synthcheck/dataset.hpp"

namespace synthcheck {

struct KMCurve {
  std::vector<double> times;  // distinct event times, increasing
  std::vector<double> surv;   // S(t) just after each event time
  std::vector<std::size_t> n_at_risk;
  double max_observed_time = 0.0;

  /// Right-continuous step function with S = 1 before the first drop.
  double at(double t) const;
};

/// Product-limit estimator. At tied times all events are processed before
/// censorings. Throws MetricError on empty or mismatched input, negative or
/// non-finite times, or events outside {0, 1}.
KMCurve km_estimate(std::span<const double> times, std::span<const double> events);

struct CurveComparison {
  double raw = 0.0;
  double score = 0.0;
  /// True when the evaluation grid was empty (raw forced to 0).
  bool empty_grid = false;
};

/// Union of both curves' drop times restricted to
/// [0, min(max_observed_real, max_observed_syn)].
std::vector<double> comparison_grid(const KMCurve& real, const KMCurve& syn);

CurveComparison km_divergence(const KMCurve& real, const KMCurve& syn);
CurveComparison optimism(const KMCurve& real, const KMCurve& syn);
CurveComparison short_sightedness(const KMCurve& real, const KMCurve& syn);

struct SurvivalScores {
  double optimism_raw = 0.0;
  double shortsight_raw = 0.0;
  double divergence_raw = 0.0;
  double optimism_score = 0.0;
  double shortsight_score = 0.0;
  double divergence_score = 0.0;
  double survival_metric = 0.0;
  bool empty_grid = false;
  /// Synthetic rows left out of the curve (missing, non-finite or negative
  /// time, or unusable status).
  std::size_t excluded_rows = 0;
};

SurvivalScores combine_survival(const KMCurve& real, const KMCurve& syn);

/// Survival Metric from the (OSTM, OSSTAT) pair of each dataset.
SurvivalScores survival_metric(const Dataset& real, const Dataset& syn, const SurvivalColumns& sc);

}  // namespace synthcheck
