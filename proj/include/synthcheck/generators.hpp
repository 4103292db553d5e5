#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "synthcheck/dataset.hpp"

namespace synthcheck {

// ---------------------------------------------------------------------------
// Gaussian copula

struct CopulaParams {
  double correlation_shrinkage = 0.8;
  std::size_t marginal_bins = 20;
  double jitter = 0.2;
  double category_smoothing = 1.0;

  void check() const;
  nlohmann::json to_json() const;
  /// Missing keys keep their defaults; unknown keys are rejected.
  static CopulaParams from_json(const nlohmann::json& hyperparameters);
};

class CopulaModel {
 public:
  static CopulaModel fit(const Dataset& train, const CopulaParams& params);

  Dataset sample(std::size_t n, std::uint64_t seed) const;

  /// Latent correlation after shrinkage.
  const Eigen::MatrixXd& correlation() const noexcept { return correlation_; }
  /// Rank-based latent correlation before shrinkage.
  const Eigen::MatrixXd& empirical_correlation() const noexcept { return empirical_; }
  const Schema& schema() const noexcept { return schema_; }

 private:
  struct Marginal {
    bool numeric = false;
    double missing_mass = 0.0;
    std::vector<double> knots;       // numeric: quantiles at i / bins
    double noise_sd = 0.0;           // numeric: jitter scale
    std::vector<std::string> levels;  // discrete, in latent order
    std::vector<double> cumulative;   // discrete: upper edge per level
    bool has_missing_level = false;   // discrete: first interval is missing
  };

  Cell draw(const Marginal& m, const ColumnSchema& schema, double u, double noise) const;

  Schema schema_;
  std::vector<Marginal> marginals_;
  Eigen::MatrixXd empirical_;
  Eigen::MatrixXd correlation_;
  Eigen::MatrixXd cholesky_;
};

/// Standard normal CDF and its inverse.
double normal_cdf(double z);
double normal_quantile(double p);

// ---------------------------------------------------------------------------
// Generator interface

class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string name() const = 0;
  /// Whether clamp_postprocess runs unless the caller overrides it.
  virtual bool clamp_by_default() const { return false; }
  /// Fits on train and returns n rows in the train schema.
  virtual Dataset fit_sample(const Dataset& train, const nlohmann::json& hyperparameters, std::size_t n,
                             std::uint64_t train_seed, std::uint64_t sample_seed) = 0;
};

class CopulaGenerator : public Generator {
 public:
  std::string name() const override { return "builtin:copula"; }
  bool clamp_by_default() const override { return true; }
  Dataset fit_sample(const Dataset& train, const nlohmann::json& hyperparameters, std::size_t n,
                     std::uint64_t train_seed, std::uint64_t sample_seed) override;
};

struct ProtocolRequest {
  std::string command = "fit_sample";
  std::string train_csv;
  std::string schema_json;
  nlohmann::json hyperparameters = nlohmann::json::object();
  std::size_t n_samples = 0;
  std::uint64_t train_seed = 0;
  std::uint64_t sample_seed = 0;
  std::string out_csv;

  nlohmann::json to_json() const;
};

struct ProtocolResponse {
  std::string status;
  std::optional<std::string> out_csv;
  std::optional<std::string> message;

  /// Throws GeneratorError on a malformed document.
  static ProtocolResponse parse(const std::string& text);
};

struct ProcessResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

/// Runs argv with stdin fed from input, capturing stdout and stderr. The
/// process group is killed and GeneratorTimeout thrown when the timeout
/// expires.
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input,
                          std::chrono::milliseconds timeout);

/// Talks to an external generator over the stdin/stdout JSON protocol.
class ExternalGenerator : public Generator {
 public:
  ExternalGenerator(std::vector<std::string> command, std::chrono::milliseconds timeout = std::chrono::hours(1));

  std::string name() const override;
  Dataset fit_sample(const Dataset& train, const nlohmann::json& hyperparameters, std::size_t n,
                     std::uint64_t train_seed, std::uint64_t sample_seed) override;

  /// Sends req and loads the produced CSV against schema.
  Dataset call(const ProtocolRequest& req, const Schema& schema) const;

 private:
  std::vector<std::string> command_;
  std::chrono::milliseconds timeout_;
};

/// "builtin:copula" or "exec:<command line>" (split on whitespace).
std::unique_ptr<Generator> make_generator(const std::string& spec,
                                          std::chrono::milliseconds timeout = std::chrono::hours(1));

// ---------------------------------------------------------------------------
// Post-processing and the full generation pipeline

/// Numeric values clipped to the real per-column range; discrete values the
/// real data never showed become the real modal category.
Dataset clamp_postprocess(const Dataset& syn, const Dataset& real);

/// Throws InvalidOutput unless syn has n rows, the given schema and only
/// allowed missing cells.
void check_generator_output(const Dataset& syn, const Schema& schema, std::size_t n);

struct PipelineOptions {
  std::optional<SurvivalColumns> survival;
  /// Train on EFSTM_dif instead of EFSTM and restore EFSTM afterwards.
  bool efstm_transform = true;
  /// Defaults to the generator's preference.
  std::optional<bool> clamp;
};

/// transform -> fit_sample -> output check -> clamp -> inverse transform.
Dataset generate_synthetic(Generator& generator, const Dataset& train, const nlohmann::json& hyperparameters,
                           std::size_t n, std::uint64_t train_seed, std::uint64_t sample_seed,
                           const PipelineOptions& options);

}  // namespace synthcheck
