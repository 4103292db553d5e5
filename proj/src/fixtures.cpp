#include "synthcheck/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "synthcheck/error.hpp"
#include "synthcheck/random.hpp"

namespace synthcheck {

namespace {

ColumnSchema column(std::string name, ColumnKind kind, std::vector<ColumnRole> roles = {}) {
  return ColumnSchema{std::move(name), kind, std::move(roles), false};
}

double clip(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

std::string pick(Rng& rng, const std::vector<std::string>& levels, const std::vector<double>& probs) {
  double u = rng.uniform();
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    if (u < probs[i]) return levels[i];
    u -= probs[i];
  }
  return levels.back();
}

}  // namespace

Fixture actg_like_fixture(const ActgFixtureOptions& options) {
  if (options.rows < 2) throw ConfigError("fixture needs at least two rows");
  if (!(options.exact_match_fraction >= 0.0 && options.exact_match_fraction <= 1.0)) {
    throw ConfigError("exact_match_fraction must lie in [0, 1]");
  }
  using K = ColumnKind;
  using R = ColumnRole;
  Schema schema = {
      column("age", K::integer),
      column("wtkg", K::floating),
      column("hemo", K::binary),
      column("homo", K::binary),
      column("drugs", K::binary),
      column("gender", K::binary),
      column("karnof", K::categorical),
      column("race", K::categorical),
      column("strat", K::categorical),
      column("arms", K::categorical),
      column("cd40", K::integer),
      column("OSTM", K::integer, {R::survival_time}),
      column("OSSTAT", K::binary, {R::outcome, R::survival_status}),
      column("EFSTM", K::integer, {R::survival_time}),
      column("EFSSTAT", K::binary, {R::outcome, R::survival_status}),
  };
  const std::size_t n = options.rows;
  Rng rng(mix_seed(options.seed, 0x61637467));

  struct Row {
    double age, wtkg, cd40;
    int hemo, homo, drugs, gender;
    std::string karnof, race, strat, arms;
    double exact_score;
    double ostm;
    int osstat;
  };
  std::vector<Row> rows(n);
  // A latent health factor h ties CD4 count, performance status, prior
  // therapy, weight and survival together.
  for (auto& r : rows) {
    const double h = rng.normal();
    r.race = pick(rng, {"white", "black", "other"}, {0.71, 0.2, 0.09});
    r.gender = rng.bernoulli(0.83) ? 1 : 0;
    r.homo = rng.bernoulli(r.gender ? 0.75 : 0.05) ? 1 : 0;
    r.drugs = rng.bernoulli(r.homo ? 0.06 : (r.race == "black" ? 0.35 : 0.2)) ? 1 : 0;
    r.hemo = rng.bernoulli(r.gender ? 0.09 : 0.01) ? 1 : 0;
    r.age = std::round(clip(35.0 + 8.7 * (-0.35 * h + 0.94 * rng.normal()), 12.0, 70.0));
    r.cd40 = std::round(clip(350.0 + 118.0 * (0.85 * h + 0.53 * rng.normal()), 0.0, 1200.0));
    const double k = 0.7 * h + 0.71 * rng.normal();
    r.karnof = k < -1.6 ? "70" : k < -0.8 ? "80" : k < 0.5 ? "90" : "100";
    const double st = -0.65 * h + 0.76 * rng.normal();
    r.strat = st < -0.4 ? "1" : st < 0.3 ? "2" : "3";
    r.wtkg = std::round(clip(70.0 + 9.0 * r.gender + 0.25 * (r.age - 35.0) + 5.0 * h + rng.normal(0.0, 10.0), 31.0,
                             160.0) * 100.0) / 100.0;
    r.arms = pick(rng, {"0", "1", "2", "3"}, {0.25, 0.25, 0.25, 0.25});

    const double z_cd4 = (r.cd40 - 350.0) / 118.0;
    const double z_age = (r.age - 35.0) / 8.7;
    const double z_karnof = (std::stod(r.karnof) - 90.0) / 8.0;
    const double treated = r.arms == "0" ? 0.0 : 1.0;

    // Overall survival: exponential event time, administrative censoring.
    const double rate = std::exp(-7.6 - 0.6 * z_cd4 + 0.3 * z_age - 0.25 * z_karnof - 0.35 * treated);
    const double t_event = -std::log(1.0 - rng.uniform()) / rate;
    const double t_censor = rng.uniform(600.0, 1230.0);
    r.osstat = t_event < t_censor ? 1 : 0;
    r.ostm = std::max(1.0, std::round(std::min(t_event, t_censor)));

    // Rows with the highest score keep EFS = OS; the covariate part is weak
    // next to the logistic noise.
    const double u = std::clamp(rng.uniform(), 1e-12, 1.0 - 1e-12);
    r.exact_score = 0.35 * z_cd4 + 0.15 * z_karnof + 0.25 * treated + std::log(u / (1.0 - u));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rows[a].exact_score > rows[b].exact_score; });
  const auto n_exact = static_cast<std::size_t>(std::llround(options.exact_match_fraction * static_cast<double>(n)));
  std::vector<bool> exact(n, false);
  for (std::size_t i = 0; i < n_exact; ++i) exact[order[i]] = true;

  Dataset ds(schema);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = rows[i];
    double efstm = r.ostm;
    int efsstat = r.osstat;
    if (!exact[i]) {
      r.ostm = std::max(r.ostm, 2.0);
      efstm = std::clamp(std::round(r.ostm * rng.uniform(0.1, 0.9)), 1.0, r.ostm - 1.0);
      efsstat = 1;
    }
    ds.add_row({r.age, r.wtkg, double(r.hemo), double(r.homo), double(r.drugs), double(r.gender), r.karnof, r.race,
                r.strat, r.arms, r.cd40, r.ostm, double(r.osstat), efstm, double(efsstat)});
  }
  SurvivalColumns sc{"OSTM", "EFSTM", "OSSTAT", "EFSSTAT", "EFSTM_dif"};
  return Fixture{SchemaDocument{schema, sc}, std::move(ds)};
}

ConstraintConfig actg_constraint_config() {
  ConstraintConfig cfg;
  cfg.survival = SurvivalColumns{"OSTM", "EFSTM", "OSSTAT", "EFSSTAT", "EFSTM_dif"};
  cfg.nonnegative = {"age", "wtkg", "cd40"};
  return cfg;
}

// Row plan before scattering (planted row i lands at position 37*i mod 100):
//   0-2   OSTM=-10, EFSTM=-20          V1 V2     (row 0 also age<0: V6)
//   3-4   OSTM=0,   EFSTM=50           V1 V3
//   5-12  OSTM=40,  EFSTM=60           V3        (row 6 also cd40<0: V6)
//   13-15 OSTM=EFSTM=80, status 1 vs 0 V5
//   16    OSTM=EFSTM=80, status 0 vs 1 V5 V6
//   17-19 valid times, age<0          V6
//   20-99 valid
Fixture constraint_fixture() {
  using K = ColumnKind;
  using R = ColumnRole;
  Schema schema = {
      column("OSTM", K::floating, {R::survival_time}),
      column("EFSTM", K::floating, {R::survival_time}),
      column("OSSTAT", K::binary, {R::outcome, R::survival_status}),
      column("EFSSTAT", K::binary, {R::outcome, R::survival_status}),
      column("age", K::integer),
      column("cd40", K::integer),
  };
  std::vector<std::vector<Cell>> plan(100);
  for (std::size_t j = 0; j < 100; ++j) {
    const double ostm = 100.5 + 7.0 * static_cast<double>(j);
    const bool same = j % 3 == 0;
    const double osstat = static_cast<double>(j % 2);
    plan[j] = {ostm, same ? ostm : ostm - 10.0 - static_cast<double>(j), osstat, same ? osstat : 1.0,
               30.0 + static_cast<double>(j % 40), 200.0 + 3.0 * static_cast<double>(j)};
  }
  auto set = [&](std::size_t row, double ostm, double efstm) {
    plan[row][0] = ostm;
    plan[row][1] = efstm;
  };
  for (std::size_t i = 0; i <= 2; ++i) set(i, -10.0, -20.0);
  for (std::size_t i = 3; i <= 4; ++i) set(i, 0.0, 50.0);
  for (std::size_t i = 5; i <= 12; ++i) set(i, 40.0, 60.0);
  for (std::size_t i = 13; i <= 16; ++i) {
    set(i, 80.0, 80.0);
    plan[i][2] = i == 16 ? 0.0 : 1.0;
    plan[i][3] = i == 16 ? 1.0 : 0.0;
  }
  plan[0][4] = -2.0;
  plan[6][5] = -5.0;
  for (std::size_t i = 16; i <= 19; ++i) plan[i][4] = -1.0;

  std::vector<std::vector<Cell>> rows(100);
  for (std::size_t i = 0; i < 100; ++i) rows[(37 * i) % 100] = plan[i];
  SurvivalColumns sc{"OSTM", "EFSTM", "OSSTAT", "EFSSTAT", "EFSTM_dif"};
  return Fixture{SchemaDocument{schema, sc}, Dataset::from_rows(schema, rows)};
}

ConstraintConfig constraint_fixture_config() {
  ConstraintConfig cfg;
  cfg.survival = SurvivalColumns{"OSTM", "EFSTM", "OSSTAT", "EFSSTAT", "EFSTM_dif"};
  cfg.nonnegative = {"age", "cd40"};
  return cfg;
}

InvalidPlantingGenerator::InvalidPlantingGenerator(Generator& inner, SurvivalColumns survival, double fraction)
    : inner_(inner), survival_(std::move(survival)), fraction_(fraction) {
  if (!(fraction >= 0.0 && fraction <= 0.5)) throw ConfigError("planting fraction must lie in [0, 0.5]");
}

Dataset InvalidPlantingGenerator::fit_sample(const Dataset& train, const nlohmann::json& hyperparameters,
                                             std::size_t n, std::uint64_t train_seed, std::uint64_t sample_seed) {
  Dataset out = inner_.fit_sample(train, hyperparameters, n, train_seed, sample_seed);
  if (inner_.clamp_by_default()) out = clamp_postprocess(out, train);
  const auto dif = out.find(survival_.efstm_dif);
  if (!dif) throw ConfigError("invalid planting needs the " + survival_.efstm_dif + " column");
  const auto os = out.index_of(survival_.ostm);
  const bool integral = out.column_schema(*dif).kind == ColumnKind::integer;

  std::vector<std::size_t> order(out.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix_seed(sample_seed, 0x706c616e74));
  rng.shuffle(order.begin(), order.end());
  order.resize(static_cast<std::size_t>(std::llround(fraction_ * static_cast<double>(out.rows()))));
  for (auto r : order) {
    const double ostm = out.number(r, os);
    double shift = 0.25 * (std::isnan(ostm) ? 1.0 : std::abs(ostm));
    shift = integral ? std::max(1.0, std::round(shift)) : std::max(shift, 1e-3);
    out.set_number(r, *dif, -shift);
  }
  return out;
}

}  // namespace synthcheck
