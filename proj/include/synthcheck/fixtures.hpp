#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "synthcheck/constraints.hpp"
#include "synthcheck/dataset.hpp"
#include "synthcheck/generators.hpp"
#include "synthcheck/io.hpp"

namespace synthcheck {

struct ActgFixtureOptions {
  std::size_t rows = 1151;
  std::uint64_t seed = 0;
  /// Share of rows with EFSTM = OSTM and EFSSTAT = OSSTAT.
  double exact_match_fraction = 0.6;
};

struct Fixture {
  SchemaDocument schema;
  Dataset data;
};

/// Simulated trial with the ACTG column mix: 6 binary, 4 categorical,
/// 4 integer and 1 float column. Survival times are in days; EFSSTAT carries
/// only a weak covariate signal.
Fixture actg_like_fixture(const ActgFixtureOptions& options = {});

/// Nonnegative columns of the ACTG-like fixture.
ConstraintConfig actg_constraint_config();

/// 100 rows with planted V1/V2/V3/V5/V6 violations (see fixtures.cpp for the
/// row plan). Columns OSTM, EFSTM, OSSTAT, EFSSTAT, age, cd40.
Fixture constraint_fixture();
ConstraintConfig constraint_fixture_config();

/// Wraps a generator and turns a random share of its output rows into V3
/// violations with EFSTM a quarter beyond OSTM. Works in EFSTM_dif space, so run it through
/// generate_synthetic with the transform enabled. Clamping of the inner
/// output happens here, before planting.
class InvalidPlantingGenerator : public Generator {
 public:
  InvalidPlantingGenerator(Generator& inner, SurvivalColumns survival, double fraction = 0.2);

  std::string name() const override { return "planting:" + inner_.name(); }
  bool clamp_by_default() const override { return false; }
  Dataset fit_sample(const Dataset& train, const nlohmann::json& hyperparameters, std::size_t n,
                     std::uint64_t train_seed, std::uint64_t sample_seed) override;

 private:
  Generator& inner_;
  SurvivalColumns survival_;
  double fraction_;
};

}  // namespace synthcheck
