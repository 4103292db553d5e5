#include "synthcheck/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include "synthcheck/association.hpp"
#include "synthcheck/error.hpp"
#include "synthcheck/survival.hpp"

namespace synthcheck {

std::string default_endpoint(const SchemaDocument& schema) {
  if (schema.survival) return schema.survival->efsstat;
  const auto outcomes = binary_outcome_columns(schema.columns);
  if (outcomes.empty()) throw ConfigError("schema has no binary outcome column to use as endpoint");
  return outcomes.front();
}

EvaluationContext prepare_context(const SchemaDocument& schema, const Dataset& real_train,
                                  const std::vector<std::string>& metrics, const ContextOptions& options,
                                  TuningCache* cache) {
  EvaluationContext ctx;
  ctx.metrics = options.metrics;
  ctx.survival = schema.survival;
  if (std::find(metrics.begin(), metrics.end(), metric_names::ml_efficiency) == metrics.end()) return ctx;
  const auto label = options.endpoint ? *options.endpoint : default_endpoint(schema);
  ctx.endpoint = EndpointSpec::for_label(schema.columns, label, schema.survival);
  if (cache) {
    ctx.classifier = cache->get_or_tune(real_train, *ctx.endpoint, options.tuning_budget, options.tuning_seed);
  } else {
    ctx.classifier = tune_classifier(real_train, *ctx.endpoint, options.tuning_budget, options.tuning_seed).spec;
  }
  return ctx;
}

MetricReport evaluate_metrics(const Dataset& reference, const Dataset& syn, const Dataset& ml_test,
                              const EvaluationContext& context, const std::vector<std::string>& metrics) {
  namespace mn = metric_names;
  MetricReport report;
  report.seed = context.metrics.spmse.seed;
  const auto& cfg = context.metrics;
  for (const auto& name : metrics) {
    double value = 0.0;
    if (name == mn::basic_statistical) {
      value = basic_statistical_measure(reference, syn);
    } else if (name == mn::support_coverage) {
      value = regularized_support_coverage(reference, syn, cfg.coverage_bins);
    } else if (name == mn::log_correlation) {
      value = log_correlation_score(reference, syn, cfg.min_correlation);
    } else if (name == mn::spmse) {
      const auto r = spmse_index(reference, syn, cfg.spmse);
      value = r.score;
      report.details[name] = {
          {"pmse", r.pmse}, {"pmse0", r.pmse0}, {"ratio", r.ratio}, {"c", r.c}, {"converged", r.converged}};
    } else if (name == mn::kmeans) {
      value = kmeans_score(reference, syn, cfg.kmeans);
    } else if (name == mn::survival) {
      if (!context.survival) throw MetricError("survival metric needs survival columns in the schema");
      const auto s = survival_metric(reference, syn, *context.survival);
      value = s.survival_metric;
      report.details[name] = {{"optimism_raw", s.optimism_raw},
                              {"optimism_score", s.optimism_score},
                              {"shortsight_raw", s.shortsight_raw},
                              {"shortsight_score", s.shortsight_score},
                              {"divergence_raw", s.divergence_raw},
                              {"divergence_score", s.divergence_score},
                              {"empty_grid", s.empty_grid},
                              {"excluded_rows", s.excluded_rows}};
    } else if (name == mn::ml_efficiency) {
      if (!context.endpoint || !context.classifier) {
        throw MetricError("ML efficiency needs an endpoint and a tuned classifier");
      }
      const auto r = ml_efficiency(syn, ml_test, *context.endpoint, *context.classifier);
      value = r.value;
      report.details[name] = {{"endpoint", context.endpoint->label_column}, {"degenerate", r.degenerate}};
    } else {
      throw MetricError("unknown metric '" + name + "'");
    }
    report.add(name, value);
  }
  return report;
}

RoundEvaluator make_cv_objective(Generator& generator, std::vector<Fold> folds, Strategy strategy,
                                 EvaluationContext context, PipelineOptions pipeline, std::uint64_t train_seed,
                                 std::uint64_t sample_seed) {
  return [&generator, folds = std::move(folds), strategy = std::move(strategy), context = std::move(context),
          pipeline = std::move(pipeline), train_seed, sample_seed](const Params& params, std::size_t round) {
    const auto& fold = folds.at(round % folds.size());
    const auto syn =
        generate_synthetic(generator, fold.train, params, fold.train.rows(), train_seed, sample_seed, pipeline);
    const auto report = evaluate_metrics(fold.train, syn, fold.holdout, context, strategy.metrics);
    return strategy_score(report, strategy);
  };
}

// ---------------------------------------------------------------------------

void ExperimentPlan::check() const {
  if (sets.empty()) throw ConfigError("experiment needs at least one hyperparameter set");
  std::set<std::string> names;
  for (const auto& s : sets) {
    if (!names.insert(s.name).second) throw ConfigError("duplicate hyperparameter set '" + s.name + "'");
  }
  if (train_seeds.empty() || sample_seeds.empty()) throw ConfigError("experiment seed lists must be nonempty");
  if (drop_invalid && !constraints) throw ConfigError("drop_invalid needs a constraint configuration");
  if (metric_set.empty()) throw ConfigError("experiment needs at least one metric");
}

std::size_t EvaluationMatrix::failed() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const auto& c) { return !c.ok; }));
}

nlohmann::json metric_report_json(const MetricReport& report) {
  nlohmann::json values = nlohmann::json::object();
  for (const auto& v : report.values) values[v.name] = v.value;
  nlohmann::json j = {{"metrics", values}, {"details", report.details}, {"seed", report.seed}};
  if (!report.real_id.empty()) j["real"] = report.real_id;
  if (!report.synthetic_id.empty()) j["synthetic"] = report.synthetic_id;
  return j;
}

nlohmann::json EvaluationMatrix::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json j = {{"set", c.set},
                        {"train_seed", c.train_seed},
                        {"sample_seed", c.sample_seed},
                        {"status", c.ok ? "ok" : "failed"}};
    if (!c.ok) j["error"] = c.error;
    if (c.ok) {
      const auto r = metric_report_json(c.report);
      j["metrics"] = r.at("metrics");
      j["details"] = r.at("details");
    }
    if (!c.constraints.is_null()) j["constraints"] = c.constraints;
    j["removed"] = c.removed;
    list.push_back(std::move(j));
  }
  return {{"cells", list}};
}

nlohmann::json EvaluationMatrix::timings_json() const {
  nlohmann::json list = nlohmann::json::array();
  double total = 0.0;
  for (const auto& c : cells) {
    list.push_back({{"set", c.set}, {"train_seed", c.train_seed}, {"sample_seed", c.sample_seed}, {"seconds", c.seconds}});
    total += c.seconds;
  }
  return {{"cells", list}, {"total_seconds", total}};
}

EvaluationMatrix EvaluationMatrix::from_json(const nlohmann::json& doc) {
  EvaluationMatrix m;
  try {
    for (const auto& j : doc.at("cells")) {
      MatrixCell c;
      c.set = j.at("set").get<std::string>();
      c.train_seed = j.at("train_seed").get<std::uint64_t>();
      c.sample_seed = j.at("sample_seed").get<std::uint64_t>();
      c.ok = j.at("status").get<std::string>() == "ok";
      c.error = j.value("error", std::string{});
      if (c.ok) {
        for (const auto& [name, value] : j.at("metrics").items()) {
          c.report.add(name, value.is_null() ? NAN : value.get<double>());
        }
        c.report.details = j.value("details", nlohmann::json::object());
      }
      c.constraints = j.value("constraints", nlohmann::json());
      c.removed = j.value("removed", std::size_t{0});
      m.cells.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed evaluation matrix: ") + e.what());
  }
  return m;
}

EvaluationMatrix run_experiment(const ExperimentPlan& plan, Generator& generator, const Dataset& real_train,
                                const Dataset& real_test) {
  plan.check();
  EvaluationMatrix matrix;
  for (const auto& set : plan.sets) {
    for (auto ts : plan.train_seeds) {
      for (auto ss : plan.sample_seeds) {
        const auto start = std::chrono::steady_clock::now();
        MatrixCell cell;
        cell.set = set.name;
        cell.train_seed = ts;
        cell.sample_seed = ss;
        try {
          auto syn = generate_synthetic(generator, real_train, set.params, real_train.rows(), ts, ss, plan.pipeline);
          if (plan.constraints) {
            const auto& cc = *plan.constraints;
            const auto report = validate(syn, cc.survival, cc.nonnegative);
            const auto match = match_ratios(syn, cc.survival, cc.relaxed_tolerance);
            cell.constraints = report.to_json();
            cell.constraints["match"] = {
                {"exact", match.exact}, {"relaxed", match.relaxed}, {"tolerance", match.tolerance}};
            if (plan.drop_invalid) {
              auto removal = remove_invalid(syn, report);
              cell.removed = removal.removed;
              syn = std::move(removal.data);
            }
          }
          cell.report = evaluate_metrics(real_test, syn, real_test, plan.evaluation, plan.metric_set);
          cell.report.synthetic_id = set.name + "/" + std::to_string(ts) + "/" + std::to_string(ss);
        } catch (const Error& e) {
          cell.ok = false;
          cell.error = e.what();
          cell.report = MetricReport{};
        }
        cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        matrix.cells.push_back(std::move(cell));
      }
    }
  }
  return matrix;
}

// ---------------------------------------------------------------------------

MetricStats describe(std::vector<double> values) {
  MetricStats s;
  s.n = values.size();
  if (values.empty()) return s;
  // Sorted summation keeps the result independent of input order.
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    std::vector<double> sq;
    for (double v : values) sq.push_back((v - s.mean) * (v - s.mean));
    std::sort(sq.begin(), sq.end());
    s.std = std::sqrt(std::accumulate(sq.begin(), sq.end(), 0.0) / static_cast<double>(s.n - 1));
  }
  return s;
}

namespace {

nlohmann::json stats_json(const MetricStats& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max}, {"n", s.n}};
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

AggregateReport aggregate(const EvaluationMatrix& matrix) {
  std::vector<const MatrixCell*> cells;
  AggregateReport out;
  for (const auto& c : matrix.cells) {
    if (c.ok) {
      cells.push_back(&c);
    } else {
      out.failed_cells.push_back(c.set + "/" + std::to_string(c.train_seed) + "/" + std::to_string(c.sample_seed));
    }
  }
  std::sort(out.failed_cells.begin(), out.failed_cells.end());
  if (cells.empty()) throw MetricError("aggregate: no successful cells");
  std::sort(cells.begin(), cells.end(), [](const MatrixCell* a, const MatrixCell* b) {
    return std::tie(a->set, a->train_seed, a->sample_seed) < std::tie(b->set, b->train_seed, b->sample_seed);
  });

  std::set<std::string> present;
  for (const auto* c : cells) {
    for (const auto& v : c->report.values) present.insert(v.name);
  }
  for (const auto& name : all_metric_names()) {
    if (present.erase(name)) out.metric_order.push_back(name);
  }
  out.metric_order.insert(out.metric_order.end(), present.begin(), present.end());

  std::map<std::string, std::vector<double>> cell_averages;
  for (const auto& name : out.metric_order) {
    std::vector<double> all;
    std::map<std::string, std::vector<double>> by_set;
    for (const auto* c : cells) {
      if (const auto v = c->report.get(name)) {
        all.push_back(*v);
        by_set[c->set].push_back(*v);
      }
    }
    out.metrics[name] = describe(all);
    for (auto& [set, values] : by_set) out.per_set[set][name] = describe(std::move(values));
  }
  for (const auto* c : cells) {
    double total = 0.0;
    for (const auto& v : c->report.values) total += v.value;
    cell_averages[c->set].push_back(total / static_cast<double>(c->report.values.size()));
  }
  for (auto& [set, values] : cell_averages) out.set_average[set] = describe(std::move(values)).mean;

  std::vector<const MatrixCell*> complete;
  for (const auto* c : cells) {
    const bool all = std::all_of(out.metric_order.begin(), out.metric_order.end(),
                                 [&](const std::string& n) { return c->report.get(n).has_value(); });
    if (all) complete.push_back(c);
  }
  out.rows = complete.size();
  if (complete.size() >= 2) {
    const auto k = static_cast<Eigen::Index>(out.metric_order.size());
    std::vector<std::vector<double>> columns(out.metric_order.size());
    for (std::size_t m = 0; m < out.metric_order.size(); ++m) {
      for (const auto* c : complete) columns[m].push_back(*c->report.get(out.metric_order[m]));
    }
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(k, k);
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = a + 1; b < k; ++b) {
        const auto& x = columns[static_cast<std::size_t>(a)];
        const auto& y = columns[static_cast<std::size_t>(b)];
        p(a, b) = p(b, a) = pearson_corr(x, y);
        s(a, b) = s(b, a) = spearman_corr(x, y);
      }
    }
    out.pearson = p;
    out.spearman = s;
  }
  return out;
}

nlohmann::json AggregateReport::to_json() const {
  nlohmann::json metrics_j = nlohmann::json::object();
  for (const auto& [name, s] : metrics) metrics_j[name] = stats_json(s);
  nlohmann::json sets_j = nlohmann::json::object();
  for (const auto& [set, by_metric] : per_set) {
    nlohmann::json m = nlohmann::json::object();
    for (const auto& [name, s] : by_metric) m[name] = stats_json(s);
    sets_j[set] = {{"metrics", m}, {"all_metric_average", set_average.at(set)}};
  }
  nlohmann::json corr;
  if (pearson && spearman) {
    corr = {{"metrics", metric_order}, {"pearson", matrix_json(*pearson)}, {"spearman", matrix_json(*spearman)}};
  } else {
    corr = {{"metrics", metric_order}, {"omitted", true}};
  }
  return {{"rows", rows},
          {"metrics", metrics_j},
          {"sets", sets_j},
          {"correlations", corr},
          {"failed_cells", failed_cells}};
}

StrategyRanking rank_strategies(const std::vector<std::pair<std::string, double>>& averages,
                                const std::string& default_name) {
  if (averages.size() < 2) throw MetricError("ranking needs at least two strategies");
  StrategyRanking r;
  for (const auto& [name, avg] : averages) {
    r.names.push_back(name);
    r.averages.push_back(avg);
  }
  std::vector<std::size_t> order(averages.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r.averages[a] > r.averages[b]; });
  r.ranks.assign(averages.size(), 0);
  for (std::size_t pos = 0; pos < order.size(); ++pos) r.ranks[order[pos]] = pos + 1;

  const auto it = std::find(r.names.begin(), r.names.end(), default_name);
  if (it != r.names.end()) {
    const double base = r.averages[static_cast<std::size_t>(it - r.names.begin())];
    std::vector<double> imp;
    for (double avg : r.averages) imp.push_back(avg / base - 1.0);
    r.improvements = imp;
  }
  return r;
}

nlohmann::json StrategyRanking::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (std::size_t i = 0; i < names.size(); ++i) {
    nlohmann::json j = {{"name", names[i]}, {"average", averages[i]}, {"rank", ranks[i]}};
    if (improvements) j["improvement"] = (*improvements)[i];
    list.push_back(j);
  }
  return {{"strategies", list}};
}

}  // namespace synthcheck
