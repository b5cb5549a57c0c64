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


#ifndef VSMHL_EXPERIMENTS_HPP
#define VSMHL_EXPERIMENTS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "vsmhl/config.hpp"
#include "vsmhl/errors.hpp"
#include "vsmhl/io.hpp"
#include "vsmhl/limit_law.hpp"
#include "vsmhl/measures.hpp"
#include "vsmhl/particles.hpp"
#include "vsmhl/pde.hpp"
#include "vsmhl/rng.hpp"
#include "vsmhl/weak_form.hpp"

namespace vsmhl {

/// Tables, a JSON summary, and the verdict of the experiment's own checks
/// (what `--assert` turns into an exit code).
struct ExperimentResult {
  std::vector<Table> tables;
  nlohmann::json summary = nlohmann::json::object();
  bool passed = true;
  std::vector<std::string> failures;

  void check(bool ok, const std::string &what) {
    if (!ok) {
      passed = false;
      failures.push_back(what);
    }
  }
};

/// Runs fn(0..count-1) on up to `threads` workers. Each task writes only to
/// its own slot, so results do not depend on scheduling. The first
/// exception thrown by any task is rethrown after all workers stop.
template <class Fn> void parallel_for(std::size_t count, std::size_t threads, Fn &&fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t k = 0; k < count; ++k) {
      fn(k);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= count || stop.load()) {
        return;
      }
      try {
        fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
        stop.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back(worker);
  }
  for (auto &t : pool) {
    t.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

/// The generator for (group, replication); depends on nothing else, so
/// adding replications or groups never changes existing streams.
inline Rng stream_for(std::uint64_t seed, std::uint64_t group, std::uint64_t replication) {
  return Rng(seed).split(group).split(replication);
}

inline double median(std::vector<double> v) {
  if (v.empty()) {
    throw DomainError("median: empty input");
  }
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace detail {

// Record stride that puts `nodes` equally spaced snapshots on the step grid.
inline std::size_t snapshot_stride(const ModelParams &params, double dt, std::size_t nodes) {
  const auto plan = plan_steps(params, dt);
  const std::size_t intervals = nodes - 1;
  if (plan.steps % intervals != 0) {
    throw ConfigError("the number of steps (" + std::to_string(plan.steps) +
                      ") must be a multiple of snapshots - 1 (" + std::to_string(intervals) + ")");
  }
  return plan.steps / intervals;
}

inline std::vector<double> recorded_times(const ModelParams &params, double dt,
                                          std::size_t stride) {
  const auto plan = plan_steps(params, dt);
  std::vector<double> t{0.0};
  for (std::size_t done = 1; done <= plan.steps; ++done) {
    if (done == plan.steps) {
      t.push_back(params.horizon);
    } else if (done % stride == 0) {
      t.push_back(static_cast<double>(done) * plan.dt);
    }
  }
  return t;
}

inline bool strictly_decreasing(const std::vector<double> &v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] < v[k - 1])) {
      return false;
    }
  }
  return true;
}

inline void require_kind(const ExperimentConfig &cfg, ExperimentKind k) {
  if (cfg.experiment != k) {
    throw ConfigError("experiment tag is '" + to_string(cfg.experiment) + "', expected '" +
                      to_string(k) + "'");
  }
}

} // namespace detail

/// sup-over-time distance between the particle path and the analytic path,
/// per (N, replication). Tables: convergence (N, replication, metric,
/// value) and convergence_medians (N, metric, median).
inline ExperimentResult run_convergence(const ExperimentConfig &cfg) {
  detail::require_kind(cfg, ExperimentKind::convergence);
  ModelParams base = cfg.params;
  base.n_particles = cfg.n_values.front();
  require_valid(base, cfg.law);
  const std::size_t stride = detail::snapshot_stride(base, cfg.dt, cfg.snapshots);
  const auto times = detail::recorded_times(base, cfg.dt, stride);
  const LimitLaw ll(cfg.params.eta, cfg.law);
  const MeasurePath analytic = limit_measure_path(ll, times);

  const std::size_t reps = cfg.replications;
  const std::size_t tasks = cfg.n_values.size() * reps;
  std::vector<double> values(tasks, 0.0);
  parallel_for(tasks, cfg.threads, [&](std::size_t k) {
    const std::size_t n = cfg.n_values[k / reps];
    const std::size_t rep = k % reps;
    ModelParams p = cfg.params;
    p.n_particles = n;
    Rng rng = stream_for(cfg.seed, n, rep);
    const auto paths = simulate_system(p, cfg.law, cfg.dt, rng, {stride});
    std::vector<Measure1D> ms;
    ms.reserve(paths.nodes());
    for (std::size_t j = 0; j < paths.nodes(); ++j) {
      ms.push_back(empirical(paths.snapshot(j)));
    }
    const MeasurePath particle(paths.time_grid, std::move(ms));
    values[k] = sup_distance(particle, analytic, cfg.metric);
  });

  ExperimentResult res;
  Table rows{"convergence", {"N", "replication", "metric", "value"}, {}};
  Table med{"convergence_medians", {"N", "metric", "median"}, {}};
  std::vector<double> medians;
  for (std::size_t a = 0; a < cfg.n_values.size(); ++a) {
    const auto n = static_cast<std::int64_t>(cfg.n_values[a]);
    std::vector<double> group(values.begin() + static_cast<std::ptrdiff_t>(a * reps),
                              values.begin() + static_cast<std::ptrdiff_t>((a + 1) * reps));
    for (std::size_t r = 0; r < reps; ++r) {
      rows.add({n, static_cast<std::int64_t>(r), to_string(cfg.metric), group[r]});
    }
    medians.push_back(median(group));
    med.add({n, to_string(cfg.metric), medians.back()});
  }
  res.tables = {rows, med};
  res.summary["medians"] = medians;
  res.summary["n_values"] = cfg.n_values;
  res.summary["snapshot_times"] = times;
  res.check(detail::strictly_decreasing(medians), "medians are not strictly decreasing in N");
  return res;
}

/// PDE solve against the analytic density plus weak-form residuals of both
/// the analytic path and the solved trajectory. Tables: pde_l1 (t,
/// l1_analytic, l1_mollified, mass, mean, analytic_mean), pde_residuals
/// (path, function, t, residual), pde_refinement (nx, nt, l1).
inline ExperimentResult run_pde_check(const ExperimentConfig &cfg) {
  detail::require_kind(cfg, ExperimentKind::pde_check);
  require_valid(cfg.params, cfg.law);
  const LimitLaw ll(cfg.params.eta, cfg.law);
  const double tail = truncation_mass(ll, cfg.params.horizon, cfg.grid.x_max);
  if (!(tail < 1e-6)) {
    throw ConfigError("pde_check: mass beyond x_max at the horizon is " +
                      std::to_string(tail) + " (must be below 1e-6)");
  }
  SolverGrid coarse{cfg.grid.x_max, cfg.grid.nx / 2, cfg.grid.nt / 2};
  if (!grid_violations(coarse).empty()) {
    throw ConfigError("pde_check: the halved grid must still have nx, nt >= 16");
  }
  const double dt_grid = cfg.params.horizon / static_cast<double>(cfg.grid.nt);
  std::vector<std::size_t> levels;
  for (double t : cfg.times) {
    const double k = std::round(t / dt_grid);
    if (std::abs(k * dt_grid - t) > 1e-9 * std::max(1.0, t)) {
      throw ConfigError("pde_check: time " + std::to_string(t) + " is not a solver time level");
    }
    levels.push_back(static_cast<std::size_t>(k));
  }

  const auto traj = solve(cfg.params, cfg.law, cfg.grid);
  const auto traj_coarse = solve(cfg.params, cfg.law, coarse);
  const LimitLaw ll_moll(cfg.params.eta, mollified_initial_law(cfg.law, cfg.grid));

  ExperimentResult res;
  Table l1{"pde_l1", {"t", "l1_analytic", "l1_mollified", "mass", "mean", "analytic_mean"}, {}};
  for (std::size_t a = 0; a < levels.size(); ++a) {
    const std::size_t n = levels[a];
    l1.add({traj.time(n), l1_error(traj, n, ll), l1_error(traj, n, ll_moll), traj.mass(n),
            traj.mean(n), ll.mean(traj.time(n))});
  }
  const double l1_fine = l1_error(traj, cfg.grid.nt, ll);
  const double l1_coarse = l1_error(traj_coarse, coarse.nt, ll);
  Table refine{"pde_refinement", {"nx", "nt", "l1"}, {}};
  refine.add({static_cast<std::int64_t>(coarse.nx), static_cast<std::int64_t>(coarse.nt),
              l1_coarse});
  refine.add({static_cast<std::int64_t>(cfg.grid.nx), static_cast<std::int64_t>(cfg.grid.nt),
              l1_fine});

  std::vector<double> atimes(cfg.analytic_time_nodes);
  for (std::size_t k = 0; k < atimes.size(); ++k) {
    atimes[k] = k + 1 == atimes.size()
                    ? cfg.params.horizon
                    : cfg.params.horizon * static_cast<double>(k) /
                          static_cast<double>(atimes.size() - 1);
  }
  const AnalyticPath apath(ll, atimes);
  const WeakFormCoefficients wc{cfg.params.eta, ll.m_lambda()};
  Table resid{"pde_residuals", {"path", "function", "t", "residual"}, {}};
  double worst_analytic = 0.0;
  double worst_pde = 0.0;
  for (const auto &tf : test_function_bank()) {
    for (double t : cfg.times) {
      const double ra = weak_residual(apath, tf, t, wc);
      resid.add({std::string("analytic"), tf.name, t, ra});
      worst_analytic = std::max(worst_analytic, std::abs(ra));
    }
    for (double t : cfg.times) {
      const double rp = weak_residual(traj, tf, t, wc);
      resid.add({std::string("pde"), tf.name, t, rp});
      worst_pde = std::max(worst_pde, std::abs(rp));
    }
  }

  res.tables = {l1, resid, refine};
  res.summary = {{"l1_final", l1_fine},
                 {"l1_coarse", l1_coarse},
                 {"refinement_ratio", l1_coarse / l1_fine},
                 {"mass_drift", traj.mass_drift()},
                 {"min_value", traj.min_value()},
                 {"cfl_ratio", traj.cfl_ratio},
                 {"truncation_mass", tail},
                 {"max_residual_analytic", worst_analytic},
                 {"max_residual_pde", worst_pde}};
  res.check(l1_fine <= 1e-2, "L1 error at the horizon exceeds 1e-2");
  res.check(traj.mass_drift() <= 1e-6, "mass drift exceeds 1e-6");
  res.check(traj.min_value() >= -1e-12, "negative cell values below -1e-12");
  res.check(l1_coarse >= l1_fine, "coarse-grid L1 is smaller than fine-grid L1");
  res.check(worst_analytic <= 1e-4, "analytic-path weak residual exceeds 1e-4");
  res.check(worst_pde <= 5e-3, "PDE weak residual exceeds 5e-3");
  return res;
}

/// KS statistic of exact samples against the CDF. Table sampler (t, n, ks,
/// critical, pass).
inline ExperimentResult run_sampler_check(const ExperimentConfig &cfg) {
  detail::require_kind(cfg, ExperimentKind::sampler_check);
  require_valid(cfg.params, cfg.law);
  const LimitLaw ll(cfg.params.eta, cfg.law);
  const std::size_t count = cfg.times.size();
  std::vector<double> ks(count, 0.0);
  parallel_for(count, cfg.threads, [&](std::size_t k) {
    Rng rng = stream_for(cfg.seed, 0, k);
    const double t = cfg.times[k];
    const auto table = ll.cdf_table(t);
    ks[k] = ks_statistic(ll.sample(t, cfg.samples, rng), table);
  });
  const double critical = 1.63 / std::sqrt(static_cast<double>(cfg.samples));
  ExperimentResult res;
  Table tab{"sampler", {"t", "n", "ks", "critical", "pass"}, {}};
  for (std::size_t k = 0; k < count; ++k) {
    const bool ok = ks[k] < critical;
    tab.add({cfg.times[k], static_cast<std::int64_t>(cfg.samples), ks[k], critical,
             static_cast<std::int64_t>(ok)});
    res.check(ok, "KS statistic above the 1% critical value at t = " +
                      std::to_string(cfg.times[k]));
  }
  res.tables = {tab};
  res.summary = {{"ks", ks}, {"critical", critical}};
  return res;
}

/// Monte Carlo E[S(t)] and E[S(t)^2] against e^{eta t/2} E[S(0)] and
/// e^{(eta + 1/N) t} E[S(0)^2]. Table moments (t, moment, mc_estimate,
/// std_error, expected, z).
inline ExperimentResult run_moment_check(const ExperimentConfig &cfg) {
  detail::require_kind(cfg, ExperimentKind::moment_check);
  require_valid(cfg.params, cfg.law);
  const auto plan = detail::plan_steps(cfg.params, cfg.dt);
  std::vector<std::size_t> want;
  for (double t : cfg.times) {
    const double k = std::round(t / plan.dt);
    if (std::abs(k * plan.dt - t) > 1e-9 * std::max(1.0, t)) {
      throw ConfigError("moment_check: time " + std::to_string(t) + " is not a step node");
    }
    want.push_back(static_cast<std::size_t>(k));
  }
  const std::size_t reps = cfg.replications;
  const std::size_t nt = cfg.times.size();
  std::vector<double> s_at(reps * nt, 0.0);
  parallel_for(reps, cfg.threads, [&](std::size_t r) {
    Rng rng = stream_for(cfg.seed, cfg.params.n_particles, r);
    const auto paths = simulate_system(cfg.params, cfg.law, cfg.dt, rng, {1});
    for (std::size_t a = 0; a < nt; ++a) {
      s_at[r * nt + a] = paths.totals[want[a]];
    }
  });

  const auto mom = moments(cfg.law);
  const double n = static_cast<double>(cfg.params.n_particles);
  const double es0 = n * mom.m1;
  const double es0_sq = n * mom.m2 + n * (n - 1.0) * mom.m1 * mom.m1;
  ExperimentResult res;
  Table tab{"moments", {"t", "moment", "mc_estimate", "std_error", "expected", "z"}, {}};
  nlohmann::json z_json = nlohmann::json::array();
  for (std::size_t a = 0; a < nt; ++a) {
    const double t = cfg.times[a];
    for (int order = 1; order <= 2; ++order) {
      double sum = 0.0;
      double sum_sq = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        const double s = s_at[r * nt + a];
        const double v = order == 1 ? s : s * s;
        sum += v;
        sum_sq += v * v;
      }
      const double rn = static_cast<double>(reps);
      const double mean = sum / rn;
      const double var = reps > 1 ? (sum_sq - rn * mean * mean) / (rn - 1.0) : 0.0;
      const double se = std::sqrt(std::max(var, 0.0) / rn);
      const double expected = order == 1
                                  ? es0 * std::exp(0.5 * cfg.params.eta * t)
                                  : es0_sq * std::exp((cfg.params.eta + 1.0 / n) * t);
      const double z = se > 0.0 ? (mean - expected) / se : 0.0;
      tab.add({t, static_cast<std::int64_t>(order), mean, se, expected, z});
      z_json.push_back({{"t", t}, {"moment", order}, {"z", z}});
      const double bound = order == 1 ? 3.0 : 4.0;
      res.check(std::abs(z) <= bound, "moment " + std::to_string(order) + " z-score " +
                                          std::to_string(z) + " at t = " + std::to_string(t));
    }
  }
  res.tables = {tab};
  res.summary = {{"z_scores", z_json}};
  return res;
}

/// Ranked positions at the horizon against limit quantiles. Tables rank
/// (N, replication, mean_abs_gap) and rank_medians (N, median).
inline ExperimentResult run_rank_check(const ExperimentConfig &cfg) {
  detail::require_kind(cfg, ExperimentKind::rank_check);
  ModelParams base = cfg.params;
  base.n_particles = cfg.n_values.front();
  require_valid(base, cfg.law);
  const auto plan = detail::plan_steps(base, cfg.dt);
  const LimitLaw ll(cfg.params.eta, cfg.law);
  const auto table = ll.cdf_table(cfg.params.horizon);

  const std::size_t reps = cfg.replications;
  const std::size_t tasks = cfg.n_values.size() * reps;
  std::vector<double> gaps(tasks, 0.0);
  parallel_for(tasks, cfg.threads, [&](std::size_t k) {
    const std::size_t n = cfg.n_values[k / reps];
    ModelParams p = cfg.params;
    p.n_particles = n;
    Rng rng = stream_for(cfg.seed, n, k % reps);
    const auto paths = simulate_system(p, cfg.law, cfg.dt, rng, {plan.steps});
    const auto rows = ranked_vs_limit(paths.snapshot(paths.nodes() - 1), table);
    gaps[k] = mean_rank_gap(rows);
  });

  ExperimentResult res;
  Table rows{"rank", {"N", "replication", "mean_abs_gap"}, {}};
  Table med{"rank_medians", {"N", "median"}, {}};
  std::vector<double> medians;
  for (std::size_t a = 0; a < cfg.n_values.size(); ++a) {
    const auto n = static_cast<std::int64_t>(cfg.n_values[a]);
    std::vector<double> group(gaps.begin() + static_cast<std::ptrdiff_t>(a * reps),
                              gaps.begin() + static_cast<std::ptrdiff_t>((a + 1) * reps));
    for (std::size_t r = 0; r < reps; ++r) {
      rows.add({n, static_cast<std::int64_t>(r), group[r]});
    }
    medians.push_back(median(group));
    med.add({n, medians.back()});
  }
  res.tables = {rows, med};
  res.summary = {{"medians", medians}, {"n_values", cfg.n_values}};
  res.check(detail::strictly_decreasing(medians), "rank-gap medians are not strictly decreasing");
  return res;
}

inline ExperimentResult run_experiment(const ExperimentConfig &cfg) {
  switch (cfg.experiment) {
  case ExperimentKind::convergence:
    return run_convergence(cfg);
  case ExperimentKind::pde_check:
    return run_pde_check(cfg);
  case ExperimentKind::sampler_check:
    return run_sampler_check(cfg);
  case ExperimentKind::moment_check:
    return run_moment_check(cfg);
  case ExperimentKind::rank_check:
    return run_rank_check(cfg);
  }
  throw ConfigError("unknown experiment");
}

/// Writes every table with its sidecar, plus summary.json.
inline void write_result(const std::filesystem::path &dir, const ExperimentResult &res,
                         const ExperimentConfig &cfg) {
  const auto resolved = config_to_json(cfg);
  for (const auto &t : res.tables) {
    write_table(dir, t, resolved, cfg.seed);
  }
  nlohmann::json summary = {{"schema_version", kSidecarSchemaVersion},
                            {"library_version", kLibraryVersion},
                            {"experiment", to_string(cfg.experiment)},
                            {"seed", cfg.seed},
                            {"passed", res.passed},
                            {"failures", res.failures},
                            {"results", res.summary},
                            {"config", resolved}};
  write_text(dir / "summary.json", summary.dump(2) + "\n");
}

/// Written instead of the results when a run stops with an error.
inline void write_failure_manifest(const std::filesystem::path &dir, const ExperimentConfig &cfg,
                                   const std::string &error) {
  std::filesystem::create_directories(dir);
  nlohmann::json j = {{"schema_version", kSidecarSchemaVersion},
                      {"library_version", kLibraryVersion},
                      {"experiment", to_string(cfg.experiment)},
                      {"seed", cfg.seed},
                      {"status", "failed"},
                      {"error", error},
                      {"config", config_to_json(cfg)}};
  write_text(dir / "failure.json", j.dump(2) + "\n");
}

} // namespace vsmhl

#endif // VSMHL_EXPERIMENTS_HPP
