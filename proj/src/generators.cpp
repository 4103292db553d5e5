#include "synthcheck/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "synthcheck/error.hpp"
#include "synthcheck/transforms.hpp"

namespace synthcheck {

std::unique_ptr<Generator> make_generator(const std::string& spec, std::chrono::milliseconds timeout) {
  if (spec == "builtin:copula") return std::make_unique<CopulaGenerator>();
  if (spec.rfind("exec:", 0) == 0) {
    std::istringstream in(spec.substr(5));
    std::vector<std::string> argv;
    for (std::string part; in >> part;) argv.push_back(part);
    if (argv.empty()) throw ConfigError("exec generator needs a command");
    return std::make_unique<ExternalGenerator>(std::move(argv), timeout);
  }
  throw ConfigError("unknown generator '" + spec + "' (expected builtin:copula or exec:<command>)");
}

Dataset clamp_postprocess(const Dataset& syn, const Dataset& real) {
  if (syn.cols() != real.cols()) throw DataError("clamp: schema mismatch");
  Dataset out = syn;
  for (std::size_t c = 0; c < real.cols(); ++c) {
    const auto& schema = real.column_schema(c);
    if (syn.column_schema(c).name != schema.name || syn.column_schema(c).kind != schema.kind) {
      throw DataError("clamp: schema mismatch at column '" + schema.name + "'");
    }
    if (schema.numeric()) {
      double lo = INFINITY;
      double hi = -INFINITY;
      for (double v : real.numbers(c)) {
        if (std::isnan(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (lo > hi) continue;
      for (std::size_t r = 0; r < out.rows(); ++r) {
        const double v = out.number(r, c);
        if (!std::isnan(v)) out.set_number(r, c, std::clamp(v, lo, hi));
      }
      continue;
    }
    std::map<std::string, std::size_t> counts;
    for (std::size_t r = 0; r < real.rows(); ++r) {
      if (auto cat = real.category(r, c)) ++counts[*cat];
    }
    if (counts.empty()) continue;
    // Ties go to the smallest key.
    const auto mode = std::max_element(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
                        return a.second < b.second;
                      })->first;
    for (std::size_t r = 0; r < out.rows(); ++r) {
      const auto cat = out.category(r, c);
      if (!cat || counts.count(*cat)) continue;
      if (schema.kind == ColumnKind::binary) {
        out.set_number(r, c, mode == "1" ? 1.0 : 0.0);
      } else {
        out.set_cell(r, c, mode);
      }
    }
  }
  return out;
}

void check_generator_output(const Dataset& syn, const Schema& schema, std::size_t n) {
  if (syn.rows() != n) {
    throw InvalidOutput("generator returned " + std::to_string(syn.rows()) + " rows, expected " + std::to_string(n));
  }
  if (syn.cols() != schema.size()) throw InvalidOutput("generator output has the wrong column count");
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (syn.column_schema(c).name != schema[c].name || syn.column_schema(c).kind != schema[c].kind) {
      throw InvalidOutput("generator output column " + std::to_string(c) + " does not match the schema");
    }
    if (!schema[c].missing_allowed) {
      for (std::size_t r = 0; r < syn.rows(); ++r) {
        if (syn.is_missing(r, c)) throw InvalidOutput("generator output has missing values in '" + schema[c].name + "'");
      }
    }
  }
  try {
    syn.validate();
  } catch (const DataError& e) {
    throw InvalidOutput(std::string("generator output: ") + e.what());
  }
}

Dataset generate_synthetic(Generator& generator, const Dataset& train, const nlohmann::json& hyperparameters,
                           std::size_t n, std::uint64_t train_seed, std::uint64_t sample_seed,
                           const PipelineOptions& options) {
  const bool transform = options.efstm_transform && options.survival.has_value();
  const Dataset model_input = transform ? apply_efstm_transform(train, *options.survival) : train;
  Dataset syn = generator.fit_sample(model_input, hyperparameters, n, train_seed, sample_seed);
  check_generator_output(syn, model_input.schema(), n);
  if (options.clamp.value_or(generator.clamp_by_default())) syn = clamp_postprocess(syn, model_input);
  if (transform) syn = invert_efstm_transform(syn, *options.survival);
  return syn;
}

}  // namespace synthcheck
