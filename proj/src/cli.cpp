#include "synthcheck/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "synthcheck/constraints.hpp"
#include "synthcheck/error.hpp"
#include "synthcheck/generators.hpp"
#include "synthcheck/harness.hpp"
#include "synthcheck/hpo.hpp"
#include "synthcheck/io.hpp"
#include "synthcheck/report.hpp"
#include "synthcheck/transforms.hpp"

namespace synthcheck {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", round_significant(v));
  return buf;
}

struct Common {
  std::string schema;
  std::string missing_token;
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 0;
  bool drop_invalid = false;
  bool strict = false;
  double timeout = 3600.0;
};

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
  } else {
    write_text(c.out, text);
  }
}

std::chrono::milliseconds timeout_ms(double seconds) {
  if (!(seconds > 0.0)) throw ConfigError("--timeout must be positive");
  return std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0));
}

std::vector<std::string> parse_metric_list(const std::string& text) {
  if (text.empty() || text == "all") return all_metric_names();
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  const auto& known = all_metric_names();
  while (std::getline(ss, item, ',')) {
    if (std::find(known.begin(), known.end(), item) == known.end()) {
      throw ConfigError("unknown metric '" + item + "'");
    }
    if (std::find(out.begin(), out.end(), item) == out.end()) out.push_back(item);
  }
  return out;
}

MetricsConfig load_metrics_config(const std::string& path, std::uint64_t seed) {
  MetricsConfig cfg;
  if (!path.empty()) cfg = MetricsConfig::from_json(read_json_file(path));
  if (path.empty()) {
    cfg.spmse.seed = seed;
    cfg.kmeans.seed = seed;
  }
  return cfg;
}

std::optional<ConstraintConfig> load_constraints(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return ConstraintConfig::from_json(read_json_file(path));
}

json constraint_json(const ConstraintReport& report, const MatchRatioReport& match) {
  auto j = report.to_json();
  j["match"] = {{"exact", match.exact}, {"relaxed", match.relaxed}, {"tolerance", match.tolerance}};
  return j;
}

std::string constraint_csv(const ConstraintReport& report) {
  std::string s = "rule,count,rate\n";
  for (std::size_t i = 0; i < rule_count; ++i) {
    const auto rule = static_cast<Rule>(i);
    s += std::string(rule_name(rule)) + "," + std::to_string(report.counts[i]) + "," + csv_number(report.rate(rule)) +
         "\n";
  }
  return s;
}

std::string metrics_csv(const MetricReport& report) {
  std::string s = "metric,value\n";
  for (const auto& v : report.values) s += v.name + "," + csv_number(v.value) + "\n";
  return s;
}

std::string aggregate_csv(const AggregateReport& agg) {
  std::string s = "metric,mean,std,min,max,n\n";
  for (const auto& name : agg.metric_order) {
    const auto& m = agg.metrics.at(name);
    s += name + "," + csv_number(m.mean) + "," + csv_number(m.std) + "," + csv_number(m.min) + "," +
         csv_number(m.max) + "," + std::to_string(m.n) + "\n";
  }
  return s;
}

std::string matrix_csv(const EvaluationMatrix& matrix) {
  std::vector<std::string> names;
  for (const auto& name : all_metric_names()) {
    for (const auto& c : matrix.cells) {
      if (c.ok && c.report.get(name)) {
        names.push_back(name);
        break;
      }
    }
  }
  std::string s = "set,train_seed,sample_seed,status,removed";
  for (const auto& n : names) s += "," + n;
  s += "\n";
  for (const auto& c : matrix.cells) {
    s += c.set + "," + std::to_string(c.train_seed) + "," + std::to_string(c.sample_seed) + "," +
         (c.ok ? "ok" : "failed") + "," + std::to_string(c.removed);
    for (const auto& n : names) {
      const auto v = c.ok ? c.report.get(n) : std::nullopt;
      s += "," + (v ? csv_number(*v) : std::string());
    }
    s += "\n";
  }
  return s;
}

/// Aggregate plus a ranking of the hyperparameter sets when there are two or
/// more, in the given declaration order.
json aggregate_with_ranking(const AggregateReport& agg, const std::vector<std::string>& set_order) {
  auto j = agg.to_json();
  std::vector<std::pair<std::string, double>> averages;
  for (const auto& name : set_order) {
    const auto it = agg.set_average.find(name);
    if (it != agg.set_average.end()) averages.emplace_back(name, it->second);
  }
  if (averages.size() >= 2) j["ranking"] = rank_strategies(averages).to_json();
  return j;
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::string data;
  std::string constraints;
};

int cmd_validate(const Common& c, const ValidateArgs& a, std::ostream& out) {
  const auto schema = load_schema(c.schema);
  const auto ds = load_csv(a.data, schema.columns, c.missing_token);
  const auto cfg = ConstraintConfig::from_json(read_json_file(a.constraints));
  const auto report = validate(ds, cfg.survival, cfg.nonnegative);
  const auto match = match_ratios(ds, cfg.survival, cfg.relaxed_tolerance);
  emit(c, c.format == "csv" ? constraint_csv(report) : dump_report(constraint_json(report, match)), out);
  return c.strict && report.counts[static_cast<std::size_t>(Rule::V7)] > 0 ? 1 : 0;
}

struct SplitArgs {
  std::string data;
  double test_fraction = 0.2;
  std::string train_out;
  std::string test_out;
};

int cmd_split(const Common& c, const SplitArgs& a, std::ostream& out) {
  const auto schema = load_schema(c.schema);
  const auto ds = load_csv(a.data, schema.columns, c.missing_token);
  const auto split = stratified_split(ds, a.test_fraction, c.seed);
  save_csv(a.train_out, split.train, c.missing_token);
  save_csv(a.test_out, split.test, c.missing_token);
  emit(c,
       dump_report({{"train_rows", split.train.rows()},
                    {"test_rows", split.test.rows()},
                    {"strata_key", split.strata_key},
                    {"seed", c.seed}}),
       out);
  return 0;
}

struct EvaluateArgs {
  std::string real_train;
  std::string real_test;
  std::string synthetic;
  bool real_as_synthetic = false;
  std::string constraints;
  std::string metrics = "all";
  std::string metrics_config;
  std::string endpoint;
  std::string tuning_cache;
  std::size_t tuning_budget = 30;
};

int cmd_evaluate(const Common& c, const EvaluateArgs& a, std::ostream& out) {
  if (a.synthetic.empty() == !a.real_as_synthetic) {
    throw ConfigError("evaluate needs exactly one of --synthetic and --real-as-synthetic");
  }
  const auto schema = load_schema(c.schema);
  const auto train = load_csv(a.real_train, schema.columns, c.missing_token);
  const auto test = load_csv(a.real_test, schema.columns, c.missing_token);
  auto syn = a.real_as_synthetic ? train : load_csv(a.synthetic, schema.columns, c.missing_token);
  const auto metrics = parse_metric_list(a.metrics);
  const auto constraints = load_constraints(a.constraints);
  if (c.drop_invalid && !constraints) throw ConfigError("--drop-invalid needs --constraints");

  json constraint_doc;
  std::size_t removed = 0;
  std::size_t v7 = 0;
  if (constraints) {
    const auto report = validate(syn, constraints->survival, constraints->nonnegative);
    const auto match = match_ratios(syn, constraints->survival, constraints->relaxed_tolerance);
    constraint_doc = constraint_json(report, match);
    v7 = report.counts[static_cast<std::size_t>(Rule::V7)];
    if (c.drop_invalid) {
      auto r = remove_invalid(syn, report);
      removed = r.removed;
      syn = std::move(r.data);
    }
  }

  ContextOptions opts;
  opts.metrics = load_metrics_config(a.metrics_config, c.seed);
  if (!a.endpoint.empty()) opts.endpoint = a.endpoint;
  opts.tuning_budget = a.tuning_budget;
  opts.tuning_seed = c.seed;
  const fs::path cache_path = a.tuning_cache.empty() ? fs::path(a.real_train + ".classifier.json") : fs::path(a.tuning_cache);
  TuningCache cache(cache_path);
  const auto ctx = prepare_context(schema, train, metrics, opts, &cache);
  if (cache.tune_calls() > 0) cache.save();

  auto report = evaluate_metrics(test, syn, test, ctx, metrics);
  if (c.format == "csv") {
    emit(c, metrics_csv(report), out);
  } else {
    auto doc = metric_report_json(report);
    doc["rows"] = {{"real_test", test.rows()}, {"synthetic", syn.rows()}};
    if (constraints) {
      doc["constraints"] = constraint_doc;
      doc["removed"] = removed;
    }
    if (std::find(metrics.begin(), metrics.end(), metric_names::ml_efficiency) != metrics.end()) {
      doc["classifier"] = ctx.classifier->to_json();
    }
    emit(c, dump_report(doc), out);
  }
  return c.strict && v7 > 0 ? 1 : 0;
}

struct GenerateArgs {
  std::string generator = "builtin:copula";
  std::string train;
  std::string params;
  std::optional<std::size_t> n;
  std::uint64_t train_seed = 0;
  std::uint64_t sample_seed = 0;
  bool no_transform = false;
  std::optional<bool> clamp;
};

int cmd_generate(const Common& c, const GenerateArgs& a, std::ostream& out) {
  if (c.out.empty()) throw ConfigError("generate needs --out for the synthetic CSV");
  const auto schema = load_schema(c.schema);
  const auto train = load_csv(a.train, schema.columns, c.missing_token);
  const json params = a.params.empty() ? json::object() : read_json_file(a.params);
  auto gen = make_generator(a.generator, timeout_ms(c.timeout));
  PipelineOptions pipe;
  pipe.survival = schema.survival;
  pipe.efstm_transform = !a.no_transform && schema.survival.has_value();
  pipe.clamp = a.clamp;
  const auto n = a.n.value_or(train.rows());
  const auto syn = generate_synthetic(*gen, train, params, n, a.train_seed, a.sample_seed, pipe);
  save_csv(c.out, syn, c.missing_token);
  out << dump_report({{"generator", gen->name()}, {"rows", syn.rows()}, {"out", c.out}});
  return 0;
}

struct OptimizeArgs {
  std::string generator = "builtin:copula";
  std::string train;
  std::string space;
  std::string strategy = "full";
  std::size_t trials = 30;
  std::size_t folds = 5;
  std::optional<std::size_t> rounds;
  double prune_ratio = 0.10;
  std::string metrics_config;
  std::string endpoint;
  std::size_t tuning_budget = 30;
  std::string tuning_cache;
  std::string initial;
  std::string log;
  std::uint64_t train_seed = 0;
  std::uint64_t sample_seed = 0;
  bool no_transform = false;
};

int cmd_optimize(const Common& c, const OptimizeArgs& a, std::ostream& out, std::ostream& err) {
  const auto schema = load_schema(c.schema);
  const auto train = load_csv(a.train, schema.columns, c.missing_token);
  const auto space = SearchSpace::from_json(read_json_file(a.space));
  const auto strategy = Strategy::parse(a.strategy);
  auto gen = make_generator(a.generator, timeout_ms(c.timeout));

  ContextOptions opts;
  opts.metrics = load_metrics_config(a.metrics_config, c.seed);
  if (!a.endpoint.empty()) opts.endpoint = a.endpoint;
  opts.tuning_budget = a.tuning_budget;
  opts.tuning_seed = c.seed;
  std::optional<TuningCache> cache;
  if (!a.tuning_cache.empty()) cache.emplace(fs::path(a.tuning_cache));
  const auto ctx = prepare_context(schema, train, strategy.metrics, opts, cache ? &*cache : nullptr);
  if (cache && cache->tune_calls() > 0) cache->save();

  PipelineOptions pipe;
  pipe.survival = schema.survival;
  pipe.efstm_transform = !a.no_transform && schema.survival.has_value();
  auto folds = kfold(train, a.folds, c.seed);
  const auto objective = make_cv_objective(*gen, std::move(folds), strategy, ctx, pipe, a.train_seed, a.sample_seed);

  HpoOptions hpo;
  hpo.n_trials = a.trials;
  hpo.rounds = a.rounds.value_or(a.folds);
  hpo.prune_ratio = a.prune_ratio;
  hpo.tpe.seed = c.seed;
  if (!a.initial.empty()) hpo.initial = read_json_file(a.initial);
  if (hpo.rounds > a.folds) throw ConfigError("--rounds cannot exceed --folds");

  const auto result = optimize(space, objective, hpo, [&](const Trial& t) {
    err << "trial " << t.index << " " << to_string(t.status) << " score " << csv_number(t.score) << "\n";
  });

  // JSON lines, one trial per line.
  std::string log;
  for (const auto& t : result.trials) log += canonical_json(t.to_json()).dump() + "\n";
  std::string log_path = a.log;
  if (log_path.empty()) log_path = c.out.empty() ? "optimize_trials.jsonl" : c.out + ".trials.jsonl";
  write_text(log_path, log);

  const auto& best = result.best();
  const json doc = {{"generator", gen->name()},
                    {"strategy", strategy.name()},
                    {"seed", c.seed},
                    {"best", {{"index", best.index}, {"params", best.params}, {"score", best.score}}},
                    {"counts",
                     {{"complete", result.count(TrialStatus::complete)},
                      {"pruned", result.count(TrialStatus::pruned)},
                      {"failed", result.count(TrialStatus::failed)}}},
                    {"trial_log", log_path}};
  emit(c, dump_report(doc), out);
  return 0;
}

struct ExperimentArgs {
  std::string plan;
  std::string train;
  std::string test;
  std::string generator;
};

int cmd_experiment(const Common& c, const ExperimentArgs& a, bool drop_invalid_flag, std::ostream& out) {
  if (c.out.empty()) throw ConfigError("experiment needs --out for the report directory");
  const auto schema = load_schema(c.schema);
  const auto train = load_csv(a.train, schema.columns, c.missing_token);
  const auto test = load_csv(a.test, schema.columns, c.missing_token);
  const auto doc = read_json_file(a.plan);

  ExperimentPlan plan;
  std::string generator_spec = "builtin:copula";
  ContextOptions opts;
  try {
    static const std::vector<std::string> keys = {"generator",      "sets",        "train_seeds", "sample_seeds",
                                                  "metrics",        "metrics_config", "constraints", "drop_invalid",
                                                  "efstm_transform", "clamp",       "endpoint",    "tuning_budget",
                                                  "seed"};
    for (const auto& [k, v] : doc.items()) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ConfigError("unknown plan key '" + k + "'");
    }
    generator_spec = doc.value("generator", generator_spec);
    for (const auto& s : doc.at("sets")) {
      plan.sets.push_back({s.at("name").get<std::string>(), s.value("params", json::object())});
    }
    if (doc.contains("train_seeds")) plan.train_seeds = doc["train_seeds"].get<std::vector<std::uint64_t>>();
    if (doc.contains("sample_seeds")) plan.sample_seeds = doc["sample_seeds"].get<std::vector<std::uint64_t>>();
    if (doc.contains("metrics")) plan.metric_set = doc["metrics"].get<std::vector<std::string>>();
    const auto seed = doc.value("seed", c.seed);
    opts.metrics = MetricsConfig{};
    opts.metrics.spmse.seed = seed;
    opts.metrics.kmeans.seed = seed;
    if (doc.contains("metrics_config")) opts.metrics = MetricsConfig::from_json(doc["metrics_config"]);
    if (doc.contains("constraints")) plan.constraints = ConstraintConfig::from_json(doc["constraints"]);
    plan.drop_invalid = doc.value("drop_invalid", false) || drop_invalid_flag;
    plan.pipeline.survival = schema.survival;
    plan.pipeline.efstm_transform = doc.value("efstm_transform", true) && schema.survival.has_value();
    if (doc.contains("clamp") && !doc["clamp"].is_null()) plan.pipeline.clamp = doc["clamp"].get<bool>();
    if (doc.contains("endpoint")) opts.endpoint = doc["endpoint"].get<std::string>();
    opts.tuning_budget = doc.value("tuning_budget", std::size_t{30});
    opts.tuning_seed = seed;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed experiment plan: ") + e.what());
  }
  if (!a.generator.empty()) generator_spec = a.generator;
  plan.evaluation = prepare_context(schema, train, plan.metric_set, opts);
  auto gen = make_generator(generator_spec, timeout_ms(c.timeout));

  const auto matrix = run_experiment(plan, *gen, train, test);
  const fs::path dir(c.out);
  write_report(dir / "matrix.json", matrix.to_json());
  write_report(dir / "timings.json", matrix.timings_json());
  if (c.format == "csv") write_text(dir / "matrix.csv", matrix_csv(matrix));

  std::vector<std::string> order;
  for (const auto& s : plan.sets) order.push_back(s.name);
  json summary = {{"cells", matrix.cells.size()}, {"failed", matrix.failed()}, {"out", c.out}};
  if (matrix.failed() < matrix.cells.size()) {
    const auto agg = aggregate(matrix);
    write_report(dir / "aggregate.json", aggregate_with_ranking(agg, order));
    if (c.format == "csv") write_text(dir / "aggregate.csv", aggregate_csv(agg));
  }
  out << dump_report(summary);
  return matrix.failed() == matrix.cells.size() ? 1 : 0;
}

struct ReportArgs {
  std::string matrix;
  std::vector<std::string> order;
};

int cmd_report(const Common& c, const ReportArgs& a, std::ostream& out) {
  const auto matrix = EvaluationMatrix::from_json(read_json_file(a.matrix));
  const auto agg = aggregate(matrix);
  auto order = a.order;
  if (order.empty()) {
    for (const auto& cell : matrix.cells) {
      if (std::find(order.begin(), order.end(), cell.set) == order.end()) order.push_back(cell.set);
    }
  }
  emit(c, c.format == "csv" ? aggregate_csv(agg) : dump_report(aggregate_with_ranking(agg, order)), out);
  return 0;
}

void add_common(CLI::App* sub, Common& c, bool needs_schema) {
  auto* opt = sub->add_option("--schema", c.schema, "Schema JSON document");
  if (needs_schema) opt->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "Seed");
  sub->add_option("--out", c.out, "Output path");
  sub->add_option("--missing-token", c.missing_token, "CSV missing-value token");
  sub->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_flag("--drop-invalid", c.drop_invalid, "Remove V7-invalid synthetic rows before metrics");
  sub->add_flag("--strict", c.strict, "Exit 1 when any row violates V7");
  sub->add_option("--timeout", c.timeout, "External generator timeout in seconds");
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthetic tabular data evaluation and generator tuning", "synthcheck"};
  app.require_subcommand(1);

  Common common;
  ValidateArgs va;
  SplitArgs sa;
  EvaluateArgs ea;
  GenerateArgs ga;
  OptimizeArgs oa;
  ExperimentArgs xa;
  ReportArgs ra;

  auto* validate_cmd = app.add_subcommand("validate", "Check survival constraints V1-V7");
  add_common(validate_cmd, common, true);
  validate_cmd->add_option("--data", va.data)->required()->check(CLI::ExistingFile);
  validate_cmd->add_option("--constraints", va.constraints)->required()->check(CLI::ExistingFile);

  auto* split_cmd = app.add_subcommand("split", "Stratified train/test split");
  add_common(split_cmd, common, true);
  split_cmd->add_option("--data", sa.data)->required()->check(CLI::ExistingFile);
  split_cmd->add_option("--test-fraction", sa.test_fraction);
  split_cmd->add_option("--train-out", sa.train_out)->required();
  split_cmd->add_option("--test-out", sa.test_out)->required();

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a synthetic dataset");
  add_common(evaluate_cmd, common, true);
  evaluate_cmd->add_option("--real-train", ea.real_train)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--real-test", ea.real_test)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--synthetic", ea.synthetic)->check(CLI::ExistingFile);
  evaluate_cmd->add_flag("--real-as-synthetic", ea.real_as_synthetic, "Score the real training data itself");
  evaluate_cmd->add_option("--constraints", ea.constraints)->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--metrics", ea.metrics, "Comma-separated metric names or 'all'");
  evaluate_cmd->add_option("--metrics-config", ea.metrics_config)->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--endpoint", ea.endpoint, "Binary label for ML Efficiency");
  evaluate_cmd->add_option("--tuning-cache", ea.tuning_cache, "Classifier cache file");
  evaluate_cmd->add_option("--tuning-budget", ea.tuning_budget);

  auto* generate_cmd = app.add_subcommand("generate", "Fit a generator and write a synthetic CSV");
  add_common(generate_cmd, common, true);
  generate_cmd->add_option("--generator", ga.generator);
  generate_cmd->add_option("--train", ga.train)->required()->check(CLI::ExistingFile);
  generate_cmd->add_option("--params", ga.params)->check(CLI::ExistingFile);
  generate_cmd->add_option("--n", ga.n);
  generate_cmd->add_option("--train-seed", ga.train_seed);
  generate_cmd->add_option("--sample-seed", ga.sample_seed);
  generate_cmd->add_flag("--no-transform", ga.no_transform, "Train on EFSTM directly");
  bool clamp_on = false;
  bool clamp_off = false;
  auto* clamp_flag = generate_cmd->add_flag("--clamp", clamp_on);
  generate_cmd->add_flag("--no-clamp", clamp_off)->excludes(clamp_flag);

  auto* optimize_cmd = app.add_subcommand("optimize", "TPE search over generator hyperparameters");
  add_common(optimize_cmd, common, true);
  optimize_cmd->add_option("--generator", oa.generator);
  optimize_cmd->add_option("--train", oa.train)->required()->check(CLI::ExistingFile);
  optimize_cmd->add_option("--space", oa.space)->required()->check(CLI::ExistingFile);
  optimize_cmd->add_option("--strategy", oa.strategy)->check(CLI::IsMember({"ml", "survival", "four_metrics", "four", "full"}));
  optimize_cmd->add_option("--trials", oa.trials);
  optimize_cmd->add_option("--folds", oa.folds);
  optimize_cmd->add_option("--rounds", oa.rounds);
  optimize_cmd->add_option("--prune-ratio", oa.prune_ratio);
  optimize_cmd->add_option("--metrics-config", oa.metrics_config)->check(CLI::ExistingFile);
  optimize_cmd->add_option("--endpoint", oa.endpoint);
  optimize_cmd->add_option("--tuning-budget", oa.tuning_budget);
  optimize_cmd->add_option("--tuning-cache", oa.tuning_cache);
  optimize_cmd->add_option("--initial", oa.initial, "Params JSON evaluated as the first trial")->check(CLI::ExistingFile);
  optimize_cmd->add_option("--log", oa.log, "Trial log path");
  optimize_cmd->add_option("--train-seed", oa.train_seed);
  optimize_cmd->add_option("--sample-seed", oa.sample_seed);
  optimize_cmd->add_flag("--no-transform", oa.no_transform);

  auto* experiment_cmd = app.add_subcommand("experiment", "Seed-matrix evaluation of hyperparameter sets");
  add_common(experiment_cmd, common, true);
  experiment_cmd->add_option("--plan", xa.plan)->required()->check(CLI::ExistingFile);
  experiment_cmd->add_option("--train", xa.train)->required()->check(CLI::ExistingFile);
  experiment_cmd->add_option("--test", xa.test)->required()->check(CLI::ExistingFile);
  experiment_cmd->add_option("--generator", xa.generator, "Overrides the plan's generator");

  auto* report_cmd = app.add_subcommand("report", "Aggregate an evaluation matrix");
  add_common(report_cmd, common, false);
  report_cmd->add_option("--matrix", ra.matrix)->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--order", ra.order, "Set declaration order for ranking");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return 2;
  }

  try {
    if (clamp_on) ga.clamp = true;
    if (clamp_off) ga.clamp = false;
    if (validate_cmd->parsed()) return cmd_validate(common, va, out);
    if (split_cmd->parsed()) return cmd_split(common, sa, out);
    if (evaluate_cmd->parsed()) return cmd_evaluate(common, ea, out);
    if (generate_cmd->parsed()) return cmd_generate(common, ga, out);
    if (optimize_cmd->parsed()) return cmd_optimize(common, oa, out, err);
    if (experiment_cmd->parsed()) return cmd_experiment(common, xa, common.drop_invalid, out);
    if (report_cmd->parsed()) return cmd_report(common, ra, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_dispatch(args, std::cout, std::cerr);
}

}  // namespace synthcheck
