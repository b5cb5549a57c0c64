/*
 * Copyright 2026 The vsmhl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#ifndef VSMHL_CONFIG_HPP
#define VSMHL_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vsmhl/errors.hpp"
#include "vsmhl/measures.hpp"
#include "vsmhl/model.hpp"
#include "vsmhl/pde.hpp"

namespace vsmhl {

enum class ExperimentKind { convergence, pde_check, sampler_check, moment_check, rank_check };

inline std::string to_string(ExperimentKind k) {
  switch (k) {
  case ExperimentKind::convergence:
    return "convergence";
  case ExperimentKind::pde_check:
    return "pde_check";
  case ExperimentKind::sampler_check:
    return "sampler_check";
  case ExperimentKind::moment_check:
    return "moment_check";
  case ExperimentKind::rank_check:
    return "rank_check";
  }
  return "?";
}

/// One experiment, fully resolved (defaults filled in).
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::convergence;
  ModelParams params{2.0, 256, 1.0};
  InitialLaw law = PointMass{1.0};
  double dt = 1e-3;
  std::vector<std::size_t> n_values{64, 256, 1024};
  std::size_t replications = 20;
  std::uint64_t seed = 0;
  SolverGrid grid{30.0, 1200, 800};
  std::string output_dir = "vsmhl-out";
  Metric metric = Metric::wasserstein1;
  std::size_t snapshots = 21;                  // convergence: recorded time nodes
  std::vector<double> times{0.5, 1.0};         // pde/sampler/moment check times
  std::size_t samples = 100000;                // sampler_check draws per time
  std::size_t analytic_time_nodes = 401;       // pde_check analytic path grid
  std::size_t threads = 1;
};

inline nlohmann::json law_to_json(const InitialLaw &law) {
  return std::visit(
      overloaded{
          [](const PointMass &p) { return nlohmann::json{{"type", "point"}, {"x0", p.x0}}; },
          [](const GammaLaw &g) {
            return nlohmann::json{{"type", "gamma"}, {"shape", g.shape}, {"scale", g.scale}};
          },
          [](const UniformLaw &u) {
            return nlohmann::json{{"type", "uniform"}, {"a", u.a}, {"b", u.b}};
          },
          [](const DiscreteAtoms &d) {
            nlohmann::json atoms = nlohmann::json::array();
            for (const auto &a : d.atoms) {
              atoms.push_back({{"location", a.location}, {"weight", a.weight}});
            }
            return nlohmann::json{{"type", "atoms"}, {"atoms", atoms}};
          }},
      law);
}

namespace detail {

class JsonReader {
public:
  explicit JsonReader(std::vector<std::string> &violations) : v_(violations) {}

  double number(const nlohmann::json &obj, const std::string &key, double fallback,
                bool required = false) {
    if (!obj.contains(key)) {
      if (required) {
        v_.push_back("missing required field '" + key + "'");
      }
      return fallback;
    }
    const auto &x = obj.at(key);
    if (!x.is_number()) {
      v_.push_back("field '" + key + "' must be a number");
      return fallback;
    }
    return x.get<double>();
  }

  std::uint64_t unsigned_int(const nlohmann::json &obj, const std::string &key,
                             std::uint64_t fallback, bool required = false) {
    if (!obj.contains(key)) {
      if (required) {
        v_.push_back("missing required field '" + key + "'");
      }
      return fallback;
    }
    const auto &x = obj.at(key);
    if (!x.is_number_integer() || (x.is_number_integer() && !x.is_number_unsigned() &&
                                   x.get<std::int64_t>() < 0)) {
      v_.push_back("field '" + key + "' must be a nonnegative integer");
      return fallback;
    }
    return x.get<std::uint64_t>();
  }

  std::string string(const nlohmann::json &obj, const std::string &key,
                     const std::string &fallback, bool required = false) {
    if (!obj.contains(key)) {
      if (required) {
        v_.push_back("missing required field '" + key + "'");
      }
      return fallback;
    }
    const auto &x = obj.at(key);
    if (!x.is_string()) {
      v_.push_back("field '" + key + "' must be a string");
      return fallback;
    }
    return x.get<std::string>();
  }

  void only_keys(const nlohmann::json &obj, const std::string &where,
                 std::initializer_list<const char *> allowed) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto &item : obj.items()) {
      if (!ok.count(item.key())) {
        v_.push_back("unknown field '" + item.key() + "' in " + where);
      }
    }
  }

  std::vector<std::string> &violations() { return v_; }

private:
  std::vector<std::string> &v_;
};

} // namespace detail

/// Parses {"type": "point"|"gamma"|"uniform"|"atoms", ...}; problems are
/// appended to `violations`.
inline InitialLaw law_from_json(const nlohmann::json &j, std::vector<std::string> &violations) {
  detail::JsonReader r(violations);
  if (!j.is_object()) {
    violations.emplace_back("law must be an object");
    return PointMass{1.0};
  }
  const std::string type = r.string(j, "type", "", true);
  if (type == "point") {
    r.only_keys(j, "law", {"type", "x0"});
    return PointMass{r.number(j, "x0", 1.0, true)};
  }
  if (type == "gamma") {
    r.only_keys(j, "law", {"type", "shape", "scale"});
    return GammaLaw{r.number(j, "shape", 1.0, true), r.number(j, "scale", 1.0, true)};
  }
  if (type == "uniform") {
    r.only_keys(j, "law", {"type", "a", "b"});
    return UniformLaw{r.number(j, "a", 0.0, true), r.number(j, "b", 1.0, true)};
  }
  if (type == "atoms") {
    r.only_keys(j, "law", {"type", "atoms"});
    DiscreteAtoms d;
    if (!j.contains("atoms") || !j.at("atoms").is_array() || j.at("atoms").empty()) {
      violations.emplace_back("law 'atoms' must be a nonempty array");
      return PointMass{1.0};
    }
    for (const auto &a : j.at("atoms")) {
      if (!a.is_object()) {
        violations.emplace_back("each atom must be an object with location and weight");
        continue;
      }
      r.only_keys(a, "atom", {"location", "weight"});
      d.atoms.push_back({r.number(a, "location", 0.0, true), r.number(a, "weight", 0.0, true)});
    }
    return d;
  }
  if (!type.empty()) {
    violations.push_back("unknown law type '" + type + "'");
  }
  return PointMass{1.0};
}

inline nlohmann::json config_to_json(const ExperimentConfig &c) {
  return {
      {"experiment", to_string(c.experiment)},
      {"params", {{"eta", c.params.eta}, {"n_particles", c.params.n_particles},
                  {"horizon", c.params.horizon}}},
      {"law", law_to_json(c.law)},
      {"dt", c.dt},
      {"n_values", c.n_values},
      {"replications", c.replications},
      {"seed", c.seed},
      {"grid", {{"x_max", c.grid.x_max}, {"nx", c.grid.nx}, {"nt", c.grid.nt}}},
      {"output_dir", c.output_dir},
      {"metric", to_string(c.metric)},
      {"snapshots", c.snapshots},
      {"times", c.times},
      {"samples", c.samples},
      {"analytic_time_nodes", c.analytic_time_nodes},
      {"threads", c.threads},
  };
}

/// Builds and validates a config; throws ValidationError listing every
/// problem found.
inline ExperimentConfig config_from_json(const nlohmann::json &j) {
  std::vector<std::string> v;
  detail::JsonReader r(v);
  ExperimentConfig c;
  if (!j.is_object()) {
    throw ValidationError({"config must be a JSON object"});
  }
  r.only_keys(j, "config",
              {"experiment", "params", "law", "dt", "n_values", "replications", "seed", "grid",
               "output_dir", "metric", "snapshots", "times", "samples",
               "analytic_time_nodes", "threads"});

  const std::string kind = r.string(j, "experiment", "", true);
  if (kind == "convergence") {
    c.experiment = ExperimentKind::convergence;
  } else if (kind == "pde_check") {
    c.experiment = ExperimentKind::pde_check;
  } else if (kind == "sampler_check") {
    c.experiment = ExperimentKind::sampler_check;
  } else if (kind == "moment_check") {
    c.experiment = ExperimentKind::moment_check;
  } else if (kind == "rank_check") {
    c.experiment = ExperimentKind::rank_check;
  } else if (!kind.empty()) {
    v.push_back("unknown experiment '" + kind + "'");
  }

  if (j.contains("params")) {
    const auto &p = j.at("params");
    if (!p.is_object()) {
      v.emplace_back("params must be an object");
    } else {
      r.only_keys(p, "params", {"eta", "n_particles", "horizon"});
      c.params.eta = r.number(p, "eta", c.params.eta);
      c.params.n_particles = r.unsigned_int(p, "n_particles", c.params.n_particles);
      c.params.horizon = r.number(p, "horizon", c.params.horizon);
    }
  }
  if (j.contains("law")) {
    c.law = law_from_json(j.at("law"), v);
  }
  c.dt = r.number(j, "dt", c.dt);
  if (j.contains("n_values")) {
    const auto &nv = j.at("n_values");
    if (!nv.is_array() || nv.empty()) {
      v.emplace_back("n_values must be a nonempty array of positive integers");
    } else {
      c.n_values.clear();
      for (const auto &x : nv) {
        if (!x.is_number_integer() || x.get<std::int64_t>() <= 0) {
          v.emplace_back("n_values must be a nonempty array of positive integers");
          break;
        }
        c.n_values.push_back(x.get<std::size_t>());
      }
    }
  }
  c.replications = r.unsigned_int(j, "replications", c.replications);
  c.seed = r.unsigned_int(j, "seed", c.seed);
  if (j.contains("grid")) {
    const auto &g = j.at("grid");
    if (!g.is_object()) {
      v.emplace_back("grid must be an object");
    } else {
      r.only_keys(g, "grid", {"x_max", "nx", "nt"});
      c.grid.x_max = r.number(g, "x_max", c.grid.x_max);
      c.grid.nx = r.unsigned_int(g, "nx", c.grid.nx);
      c.grid.nt = r.unsigned_int(g, "nt", c.grid.nt);
    }
  }
  c.output_dir = r.string(j, "output_dir", c.output_dir);
  const std::string metric = r.string(j, "metric", "wasserstein1");
  if (metric == "levy") {
    c.metric = Metric::levy;
  } else if (metric == "wasserstein1") {
    c.metric = Metric::wasserstein1;
  } else {
    v.push_back("metric must be 'levy' or 'wasserstein1'");
  }
  c.snapshots = r.unsigned_int(j, "snapshots", c.snapshots);
  if (j.contains("times")) {
    const auto &ts = j.at("times");
    if (!ts.is_array() || ts.empty()) {
      v.emplace_back("times must be a nonempty array of numbers");
    } else {
      c.times.clear();
      for (const auto &x : ts) {
        if (!x.is_number()) {
          v.emplace_back("times must be a nonempty array of numbers");
          break;
        }
        c.times.push_back(x.get<double>());
      }
    }
  }
  c.samples = r.unsigned_int(j, "samples", c.samples);
  c.analytic_time_nodes = r.unsigned_int(j, "analytic_time_nodes", c.analytic_time_nodes);
  c.threads = r.unsigned_int(j, "threads", c.threads);

  // Cross-field invariants.
  auto model = validate(c.params, c.law);
  v.insert(v.end(), model.begin(), model.end());
  if (!(c.dt > 0.0)) {
    v.emplace_back("dt must be positive");
  } else if (c.dt > c.params.horizon) {
    v.emplace_back("dt must not exceed the horizon");
  }
  if (c.replications < 1) {
    v.emplace_back("replications must be at least 1");
  }
  for (std::size_t k = 1; k < c.n_values.size(); ++k) {
    if (c.n_values[k] <= c.n_values[k - 1]) {
      v.emplace_back("n_values must be strictly increasing");
      break;
    }
  }
  if (c.snapshots < 2) {
    v.emplace_back("snapshots must be at least 2");
  }
  if (c.samples < 1) {
    v.emplace_back("samples must be at least 1");
  }
  if (c.analytic_time_nodes < 2) {
    v.emplace_back("analytic_time_nodes must be at least 2");
  }
  if (c.threads < 1) {
    v.emplace_back("threads must be at least 1");
  }
  for (double t : c.times) {
    if (!(t > 0.0) || t > c.params.horizon) {
      v.emplace_back("times must lie in (0, horizon]");
      break;
    }
  }
  auto gv = grid_violations(c.grid);
  if (c.experiment == ExperimentKind::pde_check) {
    v.insert(v.end(), gv.begin(), gv.end());
  }
  if (!v.empty()) {
    throw ValidationError(v);
  }
  return c;
}

inline ExperimentConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError({"cannot open config file '" + path + "'"});
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error &e) {
    throw ValidationError({std::string("config is not valid JSON: ") + e.what()});
  }
  return config_from_json(j);
}

} // namespace vsmhl

#endif // VSMHL_CONFIG_HPP
