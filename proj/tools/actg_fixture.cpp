// Writes the simulated ACTG-like dataset, its schema and an 80:20 split.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "synthcheck/error.hpp"
#include "synthcheck/fixtures.hpp"
#include "synthcheck/io.hpp"
#include "synthcheck/report.hpp"
#include "synthcheck/transforms.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write the ACTG-like fixture"};
  synthcheck::ActgFixtureOptions opts;
  std::string dir = ".";
  double test_fraction = 0.2;
  app.add_option("--out-dir", dir);
  app.add_option("--rows", opts.rows);
  app.add_option("--seed", opts.seed);
  app.add_option("--exact-fraction", opts.exact_match_fraction);
  app.add_option("--test-fraction", test_fraction);
  CLI11_PARSE(app, argc, argv);
  try {
    namespace fs = std::filesystem;
    const auto fx = synthcheck::actg_like_fixture(opts);
    const auto split = synthcheck::stratified_split(fx.data, test_fraction, opts.seed);
    fs::create_directories(dir);
    synthcheck::write_text(fs::path(dir) / "schema.json", synthcheck::schema_to_json(fx.schema) + "\n");
    synthcheck::save_csv(fs::path(dir) / "data.csv", fx.data);
    synthcheck::save_csv(fs::path(dir) / "train.csv", split.train);
    synthcheck::save_csv(fs::path(dir) / "test.csv", split.test);
    synthcheck::write_report(fs::path(dir) / "constraints.json", synthcheck::actg_constraint_config().to_json());
    std::cout << "wrote " << fx.data.rows() << " rows (" << split.train.rows() << " train, " << split.test.rows()
              << " test) to " << dir << "\n";
  } catch (const synthcheck::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
