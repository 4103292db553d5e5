#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "synthcheck/dataset.hpp"

namespace testing_support {

using synthcheck::Cell;
using synthcheck::ColumnKind;
using synthcheck::ColumnRole;
using synthcheck::ColumnSchema;
using synthcheck::Dataset;

ColumnSchema num_col(std::string name, ColumnKind kind = ColumnKind::floating, std::vector<ColumnRole> roles = {});
ColumnSchema cat_col(std::string name);
ColumnSchema bin_col(std::string name, std::vector<ColumnRole> roles = {});

/// Builds a dataset from (schema, column values) pairs.
Dataset make_dataset(const std::vector<std::pair<ColumnSchema, std::vector<Cell>>>& columns);

std::vector<Cell> numbers(const std::vector<double>& values);
std::vector<Cell> labels(const std::vector<std::string>& values);

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Command line that runs one of the Python test adapters.
std::vector<std::string> adapter_command(const std::string& script, const std::vector<std::string>& extra = {});
std::string adapter_command_line(const std::string& script, const std::vector<std::string>& extra = {});
bool python_available();

std::string read_file(const std::filesystem::path& path);

}  // namespace testing_support
