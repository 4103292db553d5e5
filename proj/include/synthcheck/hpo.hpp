#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "synthcheck/metrics.hpp"
#include "synthcheck/random.hpp"

namespace synthcheck {

/// Parameter values by name (a JSON object, so keys stay sorted).
using Params = nlohmann::json;

struct Domain {
  enum class Kind { categorical, choice_int, loguniform };
  Kind kind = Kind::categorical;
  std::vector<nlohmann::json> values;  // categorical
  std::vector<long long> choices;      // choice_int
  double lo = 0.0;                     // loguniform
  double hi = 0.0;

  std::size_t option_count() const { return kind == Kind::categorical ? values.size() : choices.size(); }
  nlohmann::json option(std::size_t i) const {
    return kind == Kind::categorical ? values.at(i) : nlohmann::json(choices.at(i));
  }
};

struct ParamSpec {
  std::string name;
  Domain domain;
};

struct SearchSpace {
  std::vector<ParamSpec> params;
  /// Each list names parameters whose values must be non-increasing.
  std::vector<std::vector<std::string>> ordering;

  /// {"params":[{"name":..,"domain":{"loguniform":[lo,hi]}|{"choice":[..]}|
  /// {"categorical":[..]}}], "ordering":[[..]]}
  static SearchSpace from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
  void check() const;
  const ParamSpec* find(const std::string& name) const;
};

/// Sorts each ordering group's values non-increasing, in place.
void apply_ordering(const SearchSpace& space, Params& params);

Params sample_random(const SearchSpace& space, Rng& rng);

struct TpeConfig {
  std::size_t n_startup = 10;
  double gamma = 0.25;
  std::size_t n_candidates = 24;
  /// Numeric kernel bandwidth floor as a fraction of the domain width.
  double bandwidth_floor = 0.01;
  std::uint64_t seed = 0;

  void check() const;
};

/// A finished observation fed to the sampler.
struct Observation {
  Params params;
  double score = 0.0;
};

/// Random until n_startup observations exist; afterwards draws n_candidates
/// from the good-trial density l and returns the one maximising l/g.
Params tpe_suggest(const SearchSpace& space, const std::vector<Observation>& history, const TpeConfig& config,
                   Rng& rng);

// ---------------------------------------------------------------------------
// Strategies

enum class StrategyId { ml, survival, four_metrics, full };

struct Strategy {
  StrategyId id = StrategyId::full;
  std::vector<std::string> metrics;

  std::string name() const;
  /// full uses full_metrics (defaults to every metric).
  static Strategy make(StrategyId id, const std::vector<std::string>& full_metrics = all_metric_names());
  static Strategy parse(const std::string& name, const std::vector<std::string>& full_metrics = all_metric_names());
};

/// Equal-weight mean of the strategy's metrics. Throws MetricError when one
/// is missing.
double strategy_score(const MetricReport& report, const Strategy& strategy);

// ---------------------------------------------------------------------------
// Trial loop

enum class TrialStatus { complete, pruned, failed };
const char* to_string(TrialStatus status) noexcept;

struct Trial {
  std::size_t index = 0;
  Params params;
  std::vector<double> round_scores;
  double score = 0.0;
  TrialStatus status = TrialStatus::complete;
  std::string error;
  double seconds = 0.0;

  /// Log record; wall-clock is left out so logs compare byte-for-byte.
  nlohmann::json to_json() const;
};

/// Score of one cross-validation round. Any synthcheck::Error thrown marks
/// the trial failed.
using RoundEvaluator = std::function<double(const Params& params, std::size_t round)>;

Trial evaluate_trial(const RoundEvaluator& evaluate, const Params& params, std::size_t rounds,
                     std::optional<double> best_so_far, double prune_ratio = 0.10, std::size_t index = 0);

struct HpoOptions {
  std::size_t n_trials = 30;
  std::size_t rounds = 5;
  double prune_ratio = 0.10;
  TpeConfig tpe;
  /// Evaluated as trial 0 instead of a sampler draw when set.
  std::optional<Params> initial;
};

struct HpoResult {
  std::vector<Trial> trials;
  std::optional<std::size_t> best_index;

  /// Throws Error when no trial completed.
  const Trial& best() const;
  std::size_t count(TrialStatus status) const;
};

/// Sequential suggest -> evaluate -> record loop.
HpoResult optimize(const SearchSpace& space, const RoundEvaluator& evaluate, const HpoOptions& options,
                   const std::function<void(const Trial&)>& on_trial = {});

}  // namespace synthcheck
