#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "synthcheck/error.hpp"
#include "synthcheck/generators.hpp"
#include "synthcheck/hpo.hpp"

namespace synthcheck {

namespace {

Domain parse_domain(const std::string& name, const nlohmann::json& d) {
  if (!d.is_object() || d.size() != 1) {
    throw ConfigError("parameter '" + name + "': domain must be an object with exactly one key");
  }
  const auto& [key, value] = *d.items().begin();
  if (!value.is_array() || value.empty()) {
    throw ConfigError("parameter '" + name + "': domain '" + key + "' needs a nonempty array");
  }
  Domain dom;
  if (key == "categorical") {
    dom.kind = Domain::Kind::categorical;
    for (const auto& v : value) {
      if (!v.is_primitive() || v.is_null()) throw ConfigError("parameter '" + name + "': categorical values must be scalars");
      dom.values.push_back(v);
    }
  } else if (key == "choice" || key == "choice_int") {
    dom.kind = Domain::Kind::choice_int;
    for (const auto& v : value) {
      if (!v.is_number_integer()) throw ConfigError("parameter '" + name + "': choice values must be integers");
      dom.choices.push_back(v.get<long long>());
    }
  } else if (key == "loguniform") {
    dom.kind = Domain::Kind::loguniform;
    if (value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
      throw ConfigError("parameter '" + name + "': loguniform needs [lo, hi]");
    }
    dom.lo = value[0].get<double>();
    dom.hi = value[1].get<double>();
    if (!(dom.lo > 0.0 && dom.lo < dom.hi)) throw ConfigError("parameter '" + name + "': loguniform needs 0 < lo < hi");
  } else {
    throw ConfigError("parameter '" + name + "': unknown domain '" + key + "'");
  }
  return dom;
}

double as_number(const nlohmann::json& v) {
  if (!v.is_number()) throw ConfigError("ordering constraint over a non-numeric value");
  return v.get<double>();
}

// --- numeric kernel density ------------------------------------------------

struct Kde {
  std::vector<double> centers;
  double sigma = 1.0;
  double lo = 0.0;
  double hi = 1.0;

  static Kde build(std::vector<double> points, double lo, double hi, double floor_fraction, std::size_t n_seen) {
    Kde k;
    k.lo = lo;
    k.hi = hi;
    k.centers = std::move(points);
    const double width = hi - lo;
    double sd = 0.0;
    const auto m = k.centers.size();
    if (m > 1) {
      const double mean = std::accumulate(k.centers.begin(), k.centers.end(), 0.0) / static_cast<double>(m);
      double ss = 0.0;
      for (double x : k.centers) ss += (x - mean) * (x - mean);
      sd = std::sqrt(ss / static_cast<double>(m - 1));
    }
    const double scott = m > 0 ? sd * std::pow(static_cast<double>(m), -0.2) : width;
    // Shrink the floor as evidence accumulates, never below floor_fraction.
    const double adaptive = width / std::min(100.0, 1.0 + static_cast<double>(n_seen));
    k.sigma = std::max({scott, floor_fraction * width, adaptive});
    return k;
  }

  double kernel(double x, double mu) const {
    const double mass = normal_cdf((hi - mu) / sigma) - normal_cdf((lo - mu) / sigma);
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI) * std::max(mass, 1e-300));
  }

  /// Mixture of the kernels and a uniform prior, equally weighted.
  double density(double x) const {
    double total = 1.0 / (hi - lo);
    for (double mu : centers) total += kernel(x, mu);
    return total / static_cast<double>(centers.size() + 1);
  }

  double sample(Rng& rng) const {
    const auto pick = rng.index(centers.size() + 1);
    if (pick == centers.size()) return rng.uniform(lo, hi);
    const double mu = centers[pick];
    for (int attempt = 0; attempt < 100; ++attempt) {
      const double x = rng.normal(mu, sigma);
      if (x >= lo && x <= hi) return x;
    }
    return std::clamp(mu, lo, hi);
  }
};

// --- discrete mass with +1 pseudo-counts ------------------------------------

struct Mass {
  std::vector<double> weights;

  static Mass build(const Domain& d, const std::vector<const Params*>& obs, const std::string& name) {
    Mass m;
    m.weights.assign(d.option_count(), 1.0);
    for (const auto* p : obs) {
      const auto& v = p->at(name);
      for (std::size_t i = 0; i < d.option_count(); ++i) {
        if (d.option(i) == v) {
          m.weights[i] += 1.0;
          break;
        }
      }
    }
    return m;
  }

  double probability(std::size_t i) const {
    return weights[i] / std::accumulate(weights.begin(), weights.end(), 0.0);
  }

  std::size_t sample(Rng& rng) const {
    double u = rng.uniform() * std::accumulate(weights.begin(), weights.end(), 0.0);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return i;
    }
    return weights.size() - 1;
  }
};

}  // namespace

SearchSpace SearchSpace::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("params") || !doc.at("params").is_array()) {
    throw ConfigError("search space needs a 'params' array");
  }
  for (const auto& [key, _] : doc.items()) {
    if (key != "params" && key != "ordering") throw ConfigError("unknown search-space key '" + key + "'");
  }
  SearchSpace space;
  for (const auto& p : doc.at("params")) {
    if (!p.is_object() || !p.contains("name") || !p.at("name").is_string() || !p.contains("domain")) {
      throw ConfigError("each search-space parameter needs 'name' and 'domain'");
    }
    const auto name = p.at("name").get<std::string>();
    space.params.push_back({name, parse_domain(name, p.at("domain"))});
  }
  if (doc.contains("ordering")) {
    if (!doc.at("ordering").is_array()) throw ConfigError("'ordering' must be an array of name lists");
    for (const auto& group : doc.at("ordering")) {
      if (!group.is_array()) throw ConfigError("'ordering' must be an array of name lists");
      std::vector<std::string> names;
      for (const auto& n : group) {
        if (!n.is_string()) throw ConfigError("ordering entries must be parameter names");
        names.push_back(n.get<std::string>());
      }
      space.ordering.push_back(std::move(names));
    }
  }
  space.check();
  return space;
}

nlohmann::json SearchSpace::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& p : params) {
    nlohmann::json domain;
    switch (p.domain.kind) {
      case Domain::Kind::categorical:
        domain["categorical"] = p.domain.values;
        break;
      case Domain::Kind::choice_int:
        domain["choice"] = p.domain.choices;
        break;
      case Domain::Kind::loguniform:
        domain["loguniform"] = {p.domain.lo, p.domain.hi};
        break;
    }
    list.push_back({{"name", p.name}, {"domain", domain}});
  }
  return {{"params", list}, {"ordering", ordering}};
}

void SearchSpace::check() const {
  std::set<std::string> names;
  for (const auto& p : params) {
    if (!names.insert(p.name).second) throw ConfigError("duplicate search-space parameter '" + p.name + "'");
  }
  for (const auto& group : ordering) {
    for (const auto& n : group) {
      const auto* spec = find(n);
      if (!spec) throw ConfigError("ordering constraint references unknown parameter '" + n + "'");
      if (spec->domain.kind == Domain::Kind::categorical) {
        for (const auto& v : spec->domain.values) {
          if (!v.is_number()) throw ConfigError("ordering constraint over non-numeric parameter '" + n + "'");
        }
      }
    }
  }
}

const ParamSpec* SearchSpace::find(const std::string& name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

void apply_ordering(const SearchSpace& space, Params& params) {
  for (const auto& group : space.ordering) {
    std::vector<nlohmann::json> values;
    for (const auto& n : group) values.push_back(params.at(n));
    std::stable_sort(values.begin(), values.end(),
                     [](const nlohmann::json& a, const nlohmann::json& b) { return as_number(a) > as_number(b); });
    for (std::size_t i = 0; i < group.size(); ++i) params[group[i]] = values[i];
  }
}

Params sample_random(const SearchSpace& space, Rng& rng) {
  Params out = nlohmann::json::object();
  for (const auto& p : space.params) {
    const auto& d = p.domain;
    if (d.kind == Domain::Kind::loguniform) {
      out[p.name] = std::clamp(std::exp(rng.uniform(std::log(d.lo), std::log(d.hi))), d.lo, d.hi);
    } else {
      out[p.name] = d.option(rng.index(d.option_count()));
    }
  }
  apply_ordering(space, out);
  return out;
}

void TpeConfig::check() const {
  if (n_startup < 1) throw ConfigError("TPE n_startup must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("TPE gamma must lie in (0, 1)");
  if (n_candidates < 1) throw ConfigError("TPE n_candidates must be >= 1");
  if (!(bandwidth_floor > 0.0)) throw ConfigError("TPE bandwidth floor must be positive");
}

Params tpe_suggest(const SearchSpace& space, const std::vector<Observation>& history, const TpeConfig& config,
                   Rng& rng) {
  config.check();
  if (history.size() < config.n_startup) return sample_random(space, rng);

  std::vector<std::size_t> order(history.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return history[a].score > history[b].score; });
  const auto n_good = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(config.gamma * static_cast<double>(history.size()))));
  std::vector<const Params*> good;
  std::vector<const Params*> bad;
  for (std::size_t i = 0; i < order.size(); ++i) (i < n_good ? good : bad).push_back(&history[order[i]].params);

  struct Model {
    bool numeric = false;
    Kde l, g;
    Mass lm, gm;
  };
  std::vector<Model> models;
  for (const auto& p : space.params) {
    Model m;
    const auto& d = p.domain;
    if (d.kind == Domain::Kind::loguniform) {
      m.numeric = true;
      const auto points = [&](const std::vector<const Params*>& set) {
        std::vector<double> xs;
        for (const auto* s : set) xs.push_back(std::log(s->at(p.name).get<double>()));
        return xs;
      };
      m.l = Kde::build(points(good), std::log(d.lo), std::log(d.hi), config.bandwidth_floor, history.size());
      m.g = Kde::build(points(bad), std::log(d.lo), std::log(d.hi), config.bandwidth_floor, history.size());
    } else {
      m.lm = Mass::build(d, good, p.name);
      m.gm = Mass::build(d, bad, p.name);
    }
    models.push_back(std::move(m));
  }

  Params best;
  double best_score = -INFINITY;
  for (std::size_t c = 0; c < config.n_candidates; ++c) {
    Params cand = nlohmann::json::object();
    double score = 0.0;
    for (std::size_t i = 0; i < space.params.size(); ++i) {
      const auto& p = space.params[i];
      const auto& m = models[i];
      if (m.numeric) {
        const double x = m.l.sample(rng);
        score += std::log(m.l.density(x)) - std::log(m.g.density(x));
        cand[p.name] = std::clamp(std::exp(x), p.domain.lo, p.domain.hi);
      } else {
        const auto k = m.lm.sample(rng);
        score += std::log(m.lm.probability(k)) - std::log(m.gm.probability(k));
        cand[p.name] = p.domain.option(k);
      }
    }
    if (score > best_score) {
      best_score = score;
      best = std::move(cand);
    }
  }
  apply_ordering(space, best);
  return best;
}

}  // namespace synthcheck
