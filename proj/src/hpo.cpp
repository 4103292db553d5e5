#include "synthcheck/hpo.hpp"

#include <chrono>
#include <cmath>

#include "synthcheck/error.hpp"

namespace synthcheck {

std::string Strategy::name() const {
  switch (id) {
    case StrategyId::ml:
      return "ml";
    case StrategyId::survival:
      return "survival";
    case StrategyId::four_metrics:
      return "four_metrics";
    case StrategyId::full:
      return "full";
  }
  return "full";
}

Strategy Strategy::make(StrategyId id, const std::vector<std::string>& full_metrics) {
  Strategy s;
  s.id = id;
  switch (id) {
    case StrategyId::ml:
      s.metrics = {metric_names::ml_efficiency};
      break;
    case StrategyId::survival:
      s.metrics = {metric_names::survival};
      break;
    case StrategyId::four_metrics:
      s.metrics = {metric_names::ml_efficiency, metric_names::survival, metric_names::spmse,
                   metric_names::log_correlation};
      break;
    case StrategyId::full:
      s.metrics = full_metrics;
      break;
  }
  return s;
}

Strategy Strategy::parse(const std::string& name, const std::vector<std::string>& full_metrics) {
  if (name == "ml") return make(StrategyId::ml, full_metrics);
  if (name == "survival") return make(StrategyId::survival, full_metrics);
  if (name == "four_metrics" || name == "four") return make(StrategyId::four_metrics, full_metrics);
  if (name == "full") return make(StrategyId::full, full_metrics);
  throw ConfigError("unknown strategy '" + name + "' (expected ml, survival, four_metrics or full)");
}

double strategy_score(const MetricReport& report, const Strategy& strategy) {
  if (strategy.metrics.empty()) throw MetricError("strategy '" + strategy.name() + "' has no metrics");
  double total = 0.0;
  for (const auto& m : strategy.metrics) {
    const auto v = report.get(m);
    if (!v) throw MetricError("metric '" + m + "' missing for strategy '" + strategy.name() + "'");
    total += *v;
  }
  return total / static_cast<double>(strategy.metrics.size());
}

const char* to_string(TrialStatus status) noexcept {
  switch (status) {
    case TrialStatus::complete:
      return "complete";
    case TrialStatus::pruned:
      return "pruned";
    case TrialStatus::failed:
      return "failed";
  }
  return "failed";
}

nlohmann::json Trial::to_json() const {
  nlohmann::json j = {{"index", index},
                      {"params", params},
                      {"round_scores", round_scores},
                      {"score", score},
                      {"status", to_string(status)}};
  if (!error.empty()) j["error"] = error;
  return j;
}

Trial evaluate_trial(const RoundEvaluator& evaluate, const Params& params, std::size_t rounds,
                     std::optional<double> best_so_far, double prune_ratio, std::size_t index) {
  if (rounds < 1) throw ConfigError("a trial needs at least one round");
  const auto start = std::chrono::steady_clock::now();
  Trial t;
  t.index = index;
  t.params = params;
  double sum = 0.0;
  try {
    for (std::size_t r = 0; r < rounds; ++r) {
      const double s = evaluate(params, r);
      if (!std::isfinite(s)) throw MetricError("round " + std::to_string(r) + " produced a non-finite score");
      t.round_scores.push_back(s);
      sum += s;
      t.score = sum / static_cast<double>(t.round_scores.size());
      if (r + 1 < rounds && best_so_far && t.score < (1.0 - prune_ratio) * *best_so_far) {
        t.status = TrialStatus::pruned;
        break;
      }
    }
  } catch (const Error& e) {
    t.status = TrialStatus::failed;
    t.score = 0.0;
    t.error = e.what();
  }
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return t;
}

const Trial& HpoResult::best() const {
  if (!best_index) throw Error("optimization finished with zero completed trials");
  return trials.at(*best_index);
}

std::size_t HpoResult::count(TrialStatus status) const {
  std::size_t n = 0;
  for (const auto& t : trials) n += t.status == status ? 1 : 0;
  return n;
}

HpoResult optimize(const SearchSpace& space, const RoundEvaluator& evaluate, const HpoOptions& options,
                   const std::function<void(const Trial&)>& on_trial) {
  space.check();
  options.tpe.check();
  if (options.n_trials < 1) throw ConfigError("optimization needs at least one trial");
  if (!(options.prune_ratio >= 0.0 && options.prune_ratio < 1.0)) throw ConfigError("prune ratio must lie in [0, 1)");

  Rng rng(options.tpe.seed);
  HpoResult result;
  std::vector<Observation> history;
  std::optional<double> best_score;
  for (std::size_t i = 0; i < options.n_trials; ++i) {
    Params params = (i == 0 && options.initial) ? *options.initial : tpe_suggest(space, history, options.tpe, rng);
    auto trial = evaluate_trial(evaluate, params, options.rounds, best_score, options.prune_ratio, i);
    if (trial.status == TrialStatus::complete && (!best_score || trial.score > *best_score)) {
      best_score = trial.score;
      result.best_index = i;
    }
    history.push_back({trial.params, trial.score});
    if (on_trial) on_trial(trial);
    result.trials.push_back(std::move(trial));
  }
  return result;
}

}  // namespace synthcheck
