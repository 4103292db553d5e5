// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "synthcheck/cli.hpp"
#include "synthcheck/constraints.hpp"
#include "synthcheck/error.hpp"
#include "synthcheck/fixtures.hpp"
#include "synthcheck/generators.hpp"
#include "synthcheck/harness.hpp"
#include "synthcheck/hpo.hpp"
#include "synthcheck/io.hpp"
#include "synthcheck/metrics.hpp"
#include "synthcheck/random.hpp"
#include "synthcheck/report.hpp"
#include "synthcheck/survival.hpp"
#include "synthcheck/transforms.hpp"
#include "test_support.hpp"

using namespace synthcheck;
using testing_support::TempDir;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const SurvivalColumns kSc{"OSTM", "EFSTM", "OSSTAT", "EFSSTAT", "EFSTM_dif"};

// ---------------------------------------------------------------------------

Outcome oracle_suite() {
  // The worked examples live in the unit test binaries; run them here.
  static const char* binaries[] = {"test_dataspec", "test_metrics",     "test_survival", "test_predictive",
                                   "test_constraints", "test_generators", "test_hpo",      "test_harness",
                                   "test_report"};
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> failed;
  for (const char* b : binaries) {
    const std::string path = std::string(SYNTHCHECK_TEST_BIN_DIR) + "/" + b;
    try {
      const auto r = run_process({path, "--gtest_brief=1"}, "", std::chrono::minutes(10));
      if (r.exit_code != 0) failed.push_back(b);
    } catch (const Error& e) {
      failed.push_back(std::string(b) + " (" + e.what() + ")");
    }
  }
  const double secs = seconds_since(t0);
  std::string detail = std::to_string(std::size(binaries) - failed.size()) + "/" + std::to_string(std::size(binaries)) +
                       " example suites green in " + fmt("%.1f", secs) + " s (limit 60 s)";
  for (const auto& f : failed) detail += "; failed " + f;
  return {failed.empty() && secs < 60.0, detail};
}

Outcome self_identity() {
  const auto fx = actg_like_fixture({1000, 17, 0.6});
  const auto copy = fx.data;
  double worst = 0.0;
  const std::vector<double> exact = {basic_statistical_measure(fx.data, copy),
                                     regularized_support_coverage(fx.data, copy),
                                     log_correlation_score(fx.data, copy), kmeans_score(fx.data, copy),
                                     survival_metric(fx.data, copy, kSc).survival_metric};
  for (double v : exact) worst = std::max(worst, std::abs(v - 1.0));
  double min_spmse = 1.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SpmseConfig cfg;
    cfg.seed = seed;
    min_spmse = std::min(min_spmse, spmse_index(fx.data, copy, cfg).score);
  }
  return {worst <= 1e-9 && min_spmse >= 0.95,
          "max |score-1| " + fmt("%.2e", worst) + " over 5 metrics; min S_pMSE " + fmt("%.4f", min_spmse) +
              " over 10 seeds"};
}

Outcome constraint_fixture_check() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto fx = constraint_fixture();
  const auto cfg = constraint_fixture_config();
  const auto rep = validate(fx.data, cfg.survival, cfg.nonnegative);
  // Hand enumeration of the planted rows (see fixtures.cpp).
  const std::array<std::size_t, rule_count> expected = {5, 3, 10, 13, 4, 6, 20};
  bool rates_ok = rep.rows == 100;
  for (std::size_t i = 0; i < rule_count; ++i) {
    rates_ok = rates_ok && rep.rate(static_cast<Rule>(i)) == static_cast<double>(expected[i]) / 100.0;
  }
  const auto kept = remove_invalid(fx.data, rep);
  const auto after = validate(kept.data, cfg.survival, cfg.nonnegative);
  const double secs = seconds_since(t0);
  std::string counts;
  for (std::size_t i = 0; i < rule_count; ++i) {
    counts += std::string(i ? " " : "") + rule_name(static_cast<Rule>(i)) + "=" + std::to_string(rep.counts[i]);
  }
  return {rates_ok && after.rate(Rule::V7) == 0.0 && secs < 1.0,
          counts + "; after removal V7=" + fmt("%.0f", after.rate(Rule::V7)) + " (" + fmt("%.3f", secs) + " s)"};
}

Outcome km_oracle() {
  struct Case {
    std::vector<double> t, e;
    std::vector<std::pair<double, double>> expected;
  };
  const std::vector<Case> cases = {
      {{1, 2, 3}, {1, 0, 1}, {{1, 2.0 / 3.0}, {3, 0.0}}},
      {{2, 2, 3, 5, 5, 7}, {1, 0, 1, 1, 0, 0}, {{2, 5.0 / 6.0}, {3, 5.0 / 8.0}, {5, 5.0 / 12.0}}},
      {{1, 1, 1, 4, 6, 6, 9, 10}, {1, 1, 0, 1, 0, 1, 1, 0}, {{1, 0.75}, {4, 0.6}, {6, 0.45}, {9, 0.225}}},
      {{3, 5, 8}, {0, 0, 0}, {}},
      {{2, 3, 3, 3, 4, 5, 6, 8, 8, 9},
       {1, 1, 1, 0, 0, 1, 0, 1, 1, 1},
       {{2, 0.9}, {3, 0.7}, {5, 14.0 / 25.0}, {8, 14.0 / 75.0}, {9, 0.0}}},
  };
  double worst = 0.0;
  bool shape = true;
  for (const auto& c : cases) {
    const auto curve = km_estimate(c.t, c.e);
    if (curve.times.size() != c.expected.size()) {
      shape = false;
      continue;
    }
    for (std::size_t i = 0; i < c.expected.size(); ++i) {
      shape = shape && curve.times[i] == c.expected[i].first;
      worst = std::max(worst, std::abs(curve.surv[i] - c.expected[i].second));
    }
  }
  return {shape && worst <= 1e-12, "5 censored fixtures, max abs error " + fmt("%.2e", worst)};
}

struct Prepared {
  Fixture fx;
  SplitResult parts;
};

const Prepared& actg() {
  static const Prepared p = [] {
    auto fx = actg_like_fixture({1151, 0, 0.6});
    auto parts = stratified_split(fx.data, 0.2, 0);
    return Prepared{std::move(fx), std::move(parts)};
  }();
  return p;
}

Outcome mcc_anchor() {
  const auto& d = actg();
  ContextOptions opt;
  opt.tuning_budget = 30;
  const auto ctx = prepare_context(d.fx.schema, d.parts.train, {metric_names::ml_efficiency}, opt);
  const auto r = evaluate_metrics(d.parts.test, d.parts.train, d.parts.test, ctx, {metric_names::ml_efficiency});
  const double v = *r.get(metric_names::ml_efficiency);
  return {v >= 0.0 && v <= 0.25, "real-on-real EFSSTAT MCC " + fmt("%.4f", v) + " (band [0, 0.25])"};
}

Outcome tpe_sanity() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto space = SearchSpace::from_json(
      nlohmann::json::parse(R"({"params": [{"name": "lr", "domain": {"loguniform": [0.00001, 0.1]}}]})"));
  const auto f = [](double lr) { return -std::pow(std::log(lr) - std::log(1e-3), 2.0); };
  std::vector<double> tpe_regret, rnd_regret;
  std::size_t hits = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    HpoOptions opt;
    opt.n_trials = 30;
    opt.rounds = 1;
    opt.tpe.seed = seed;
    const auto res = optimize(space, [&](const Params& p, std::size_t) { return f(p.at("lr").get<double>()); }, opt);
    const double best_lr = res.best().params.at("lr").get<double>();
    tpe_regret.push_back(-res.best().score);
    if (best_lr >= 2e-4 && best_lr <= 5e-3) ++hits;

    Rng rng(mix_seed(seed, 0x72616e64));
    double best = -INFINITY;
    for (int i = 0; i < 30; ++i) best = std::max(best, f(sample_random(space, rng).at("lr").get<double>()));
    rnd_regret.push_back(-best);
  }
  const auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  };
  const double mt = median(tpe_regret), mr = median(rnd_regret);
  const double secs = seconds_since(t0);
  return {mt < mr && hits >= 45 && secs < 30.0,
          "median regret TPE " + fmt("%.2e", mt) + " vs random " + fmt("%.2e", mr) + "; " + std::to_string(hits) +
              "/50 within [2e-4, 5e-3] (" + fmt("%.1f", secs) + " s)"};
}

SearchSpace copula_space() {
  return SearchSpace::from_json(nlohmann::json::parse(R"({
    "params": [
      {"name": "correlation_shrinkage", "domain": {"categorical": [0.0, 0.1, 0.2, 0.4, 0.6, 0.8]}},
      {"name": "marginal_bins", "domain": {"choice": [10, 20, 50, 100]}},
      {"name": "jitter", "domain": {"loguniform": [0.001, 0.5]}},
      {"name": "category_smoothing", "domain": {"loguniform": [0.01, 5.0]}}
    ]
  })"));
}

Outcome hpo_direction() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& d = actg();
  TuningCache cache;
  ContextOptions copt;
  const auto ctx = prepare_context(d.fx.schema, d.parts.train, all_metric_names(), copt, &cache);
  PipelineOptions pipe;
  pipe.survival = d.fx.schema.survival;
  CopulaGenerator gen;

  std::size_t wins = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto folds = kfold(d.parts.train, 5, seed);
    const auto objective = make_cv_objective(gen, std::move(folds), Strategy::make(StrategyId::full), ctx, pipe, seed,
                                             seed);
    HpoOptions hpo;
    hpo.n_trials = 30;
    hpo.rounds = 5;
    hpo.tpe.seed = seed;
    const auto result = optimize(copula_space(), objective, hpo);

    ExperimentPlan plan;
    plan.sets = {{"default", nlohmann::json::object()}, {"optimized", result.best().params}};
    plan.train_seeds = {0, 1, 2};
    plan.sample_seeds = {0, 1, 2};
    plan.evaluation = ctx;
    plan.pipeline = pipe;
    const auto agg = aggregate(run_experiment(plan, gen, d.parts.train, d.parts.test));
    const double base = agg.set_average.at("default");
    const double tuned = agg.set_average.at("optimized");
    const double gain = tuned / base - 1.0;
    if (gain >= 0.05) ++wins;
    detail += std::string(seed > 1 ? "; " : "") + "seed " + std::to_string(seed) + ": " + fmt("%.4f", base) +
              " -> " + fmt("%.4f", tuned) + " (" + fmt("%+.1f", 100.0 * gain) + "%)";
  }
  const double secs = seconds_since(t0);
  return {wins >= 2 && secs < 1800.0,
          std::to_string(wins) + "/3 runs >= +5%; " + detail + " (" + fmt("%.0f", secs) + " s)"};
}

Outcome efstm_transform() {
  const auto fx = actg_like_fixture({1151, 0, 0.6});
  CopulaGenerator gen;
  double with = 0.0, without = 0.0;
  const int runs = 3;
  for (int s = 0; s < runs; ++s) {
    PipelineOptions opt;
    opt.survival = kSc;
    opt.efstm_transform = true;
    const auto a = generate_synthetic(gen, fx.data, {}, fx.data.rows(), s, s, opt);
    opt.efstm_transform = false;
    const auto b = generate_synthetic(gen, fx.data, {}, fx.data.rows(), s, s, opt);
    with += match_ratios(a, kSc).relaxed / runs;
    without += match_ratios(b, kSc).relaxed / runs;
  }
  const double real = match_ratios(fx.data, kSc).relaxed;
  return {with - without >= 0.20, "relaxed match " + fmt("%.3f", with) + " with transform vs " +
                                      fmt("%.3f", without) + " without (real " + fmt("%.3f", real) + ", 3 seeds)"};
}

Outcome reevaluation_direction() {
  const auto& d = actg();
  CopulaGenerator inner;
  InvalidPlantingGenerator gen(inner, kSc, 0.2);
  ExperimentPlan plan;
  plan.sets = {{"default", nlohmann::json::object()}};
  plan.train_seeds = {0};
  plan.sample_seeds = {0, 1, 2, 3, 4};
  plan.metric_set = {metric_names::spmse, metric_names::basic_statistical};
  plan.evaluation.survival = kSc;
  plan.constraints = actg_constraint_config();
  plan.pipeline.survival = kSc;
  const auto off = run_experiment(plan, gen, d.parts.train, d.parts.test);
  plan.drop_invalid = true;
  const auto on = run_experiment(plan, gen, d.parts.train, d.parts.test);

  std::size_t spmse_ok = 0, bsm_ok = 0;
  std::string detail;
  for (std::size_t i = 0; i < off.cells.size(); ++i) {
    if (!off.cells[i].ok || !on.cells[i].ok) continue;
    const double ds = *on.cells[i].report.get(metric_names::spmse) - *off.cells[i].report.get(metric_names::spmse);
    const double db = *on.cells[i].report.get(metric_names::basic_statistical) -
                      *off.cells[i].report.get(metric_names::basic_statistical);
    spmse_ok += ds >= 0.0 ? 1 : 0;
    bsm_ok += db <= 0.0 ? 1 : 0;
    detail += std::string(i ? "; " : "") + "removed " + std::to_string(on.cells[i].removed) + " dS " +
              fmt("%+.4f", ds) + " dB " + fmt("%+.4f", db);
  }
  return {spmse_ok == 5 && bsm_ok == 5,
          "S_pMSE up " + std::to_string(spmse_ok) + "/5, BSM down " + std::to_string(bsm_ok) + "/5 (" + detail + ")"};
}

Outcome determinism() {
  TempDir dir;
  const auto fx = actg_like_fixture({300, 4, 0.6});
  write_text(dir / "schema.json", schema_to_json(fx.schema));
  const auto parts = stratified_split(fx.data, 0.2, 0);
  save_csv(dir / "train.csv", parts.train);
  save_csv(dir / "test.csv", parts.test);
  write_report(dir / "plan.json", nlohmann::json::parse(R"({
    "sets": [{"name": "default"}, {"name": "tight", "params": {"correlation_shrinkage": 0.1, "jitter": 0.02}}],
    "train_seeds": [0, 1], "sample_seeds": [0, 1],
    "constraints": {"survival": {"ostm": "OSTM", "efstm": "EFSTM", "osstat": "OSSTAT", "efsstat": "EFSSTAT"},
                    "nonnegative": ["age", "wtkg", "cd40"]},
    "tuning_budget": 3
  })"));
  const auto run = [&](const std::string& out) {
    std::ostringstream o, e;
    return cli_dispatch({"experiment", "--schema", (dir / "schema.json").string(), "--plan",
                         (dir / "plan.json").string(), "--train", (dir / "train.csv").string(), "--test",
                         (dir / "test.csv").string(), "--out", (dir / out).string(), "--format", "csv"},
                        o, e);
  };
  if (run("a") != 0 || run("b") != 0) return {false, "experiment command failed"};
  std::size_t same = 0;
  const char* files[] = {"matrix.json", "aggregate.json", "matrix.csv", "aggregate.csv"};
  for (const char* f : files) {
    same += testing_support::read_file(dir / "a" / f) == testing_support::read_file(dir / "b" / f) ? 1 : 0;
  }
  return {same == std::size(files), std::to_string(same) + "/4 report files byte-identical across two runs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"metric-oracle-suite", oracle_suite},
      {"self-evaluation-identity", self_identity},
      {"constraint-fixture", constraint_fixture_check},
      {"km-oracle", km_oracle},
      {"mcc-anchor", mcc_anchor},
      {"tpe-sanity", tpe_sanity},
      {"hpo-direction", hpo_direction},
      {"efstm-transform", efstm_transform},
      {"reevaluation-direction", reevaluation_direction},
      {"determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
