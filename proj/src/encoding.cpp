#include "synthcheck/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "synthcheck/error.hpp"

namespace synthcheck {

EncodingPlan EncodingPlan::fit(const Dataset& reference, std::span<const std::string> exclude) {
  EncodingPlan plan;
  for (std::size_t c = 0; c < reference.cols(); ++c) {
    const auto& schema = reference.column_schema(c);
    if (std::find(exclude.begin(), exclude.end(), schema.name) != exclude.end()) continue;
    Encoder enc;
    enc.name = schema.name;
    enc.offset = plan.width_;
    if (schema.numeric()) {
      enc.numeric = true;
      double sum = 0.0;
      std::size_t n = 0;
      for (double v : reference.numbers(c)) {
        if (std::isnan(v)) continue;
        sum += v;
        ++n;
      }
      enc.mean = n ? sum / static_cast<double>(n) : 0.0;
      double ss = 0.0;
      for (double v : reference.numbers(c)) {
        if (!std::isnan(v)) ss += (v - enc.mean) * (v - enc.mean);
      }
      const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
      enc.scale = sd > 0.0 ? sd : 1.0;
      plan.width_ += 1;
    } else {
      std::set<std::string> levels;
      for (std::size_t r = 0; r < reference.rows(); ++r) {
        if (auto cat = reference.category(r, c)) {
          levels.insert(*cat);
        } else {
          enc.missing_level = true;
        }
      }
      enc.levels.assign(levels.begin(), levels.end());
      plan.width_ += enc.levels.size() + (enc.missing_level ? 1 : 0);
    }
    plan.encoders_.push_back(std::move(enc));
  }
  return plan;
}

std::vector<std::string> EncodingPlan::feature_names() const {
  std::vector<std::string> names;
  for (const auto& enc : encoders_) {
    if (enc.numeric) {
      names.push_back(enc.name);
      continue;
    }
    for (const auto& l : enc.levels) names.push_back(enc.name + "=" + l);
    if (enc.missing_level) names.push_back(enc.name + "=<missing>");
  }
  return names;
}

Eigen::MatrixXd EncodingPlan::transform(const Dataset& ds) const {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ds.rows()),
                                            static_cast<Eigen::Index>(width_));
  for (const auto& enc : encoders_) {
    const auto c = ds.index_of(enc.name);
    const auto col = static_cast<Eigen::Index>(enc.offset);
    if (enc.numeric) {
      if (!ds.column_schema(c).numeric()) throw DataError("column '" + enc.name + "' changed kind");
      const auto values = ds.numbers(c);
      for (std::size_t r = 0; r < ds.rows(); ++r) {
        const double v = values[r];
        x(static_cast<Eigen::Index>(r), col) = std::isnan(v) ? 0.0 : (v - enc.mean) / enc.scale;
      }
      continue;
    }
    for (std::size_t r = 0; r < ds.rows(); ++r) {
      const auto cat = ds.category(r, c);
      const auto row = static_cast<Eigen::Index>(r);
      if (!cat) {
        if (enc.missing_level) x(row, col + static_cast<Eigen::Index>(enc.levels.size())) = 1.0;
        continue;
      }
      auto it = std::lower_bound(enc.levels.begin(), enc.levels.end(), *cat);
      if (it != enc.levels.end() && *it == *cat) x(row, col + (it - enc.levels.begin())) = 1.0;
    }
  }
  return x;
}

}  // namespace synthcheck
