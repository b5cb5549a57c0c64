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


#ifndef VSMHL_PARTICLES_HPP
#define VSMHL_PARTICLES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vsmhl/errors.hpp"
#include "vsmhl/model.hpp"
#include "vsmhl/rng.hpp"

namespace vsmhl {

/**
 * Discretized trajectories Y_1..Y_N on a recorded time grid. Positions are
 * stored node-major: the N values at grid node j are contiguous.
 */
struct ParticlePaths {
  std::vector<double> time_grid;
  std::size_t n_particles = 0;
  std::vector<double> positions;
  std::vector<double> totals; // S^Y at each node, the exact sum of the stored row

  std::size_t nodes() const noexcept { return time_grid.size(); }

  double position(std::size_t i, std::size_t j) const {
    return positions.at(j * n_particles + i);
  }

  std::span<const double> snapshot(std::size_t j) const {
    if (j >= nodes()) {
      throw DomainError("ParticlePaths::snapshot: node index out of range");
    }
    return {positions.data() + j * n_particles, n_particles};
  }
};

struct SimulationOptions {
  std::size_t record_stride = 1; // record every k-th step (the final step always)
};

namespace detail {

struct StepPlan {
  std::size_t steps = 0;
  double dt = 0.0;
};

// The number of steps is ceil(T/dt); dt shrinks to T/steps so the grid ends at T.
inline StepPlan plan_steps(const ModelParams &params, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw DomainError("simulate: dt must be positive");
  }
  if (dt > params.horizon) {
    throw DomainError("simulate: dt must not exceed the horizon");
  }
  const double ratio = params.horizon / dt;
  auto steps = static_cast<std::size_t>(std::ceil(ratio - 1e-9 * ratio));
  steps = std::max<std::size_t>(steps, 1);
  const double h = params.horizon / static_cast<double>(steps);
  if (h * params.eta / 2.0 > 0.5) {
    throw StepSizeError("simulate: dt * eta / 2 exceeds 0.5; reduce dt");
  }
  if (params.eta * params.horizon / 2.0 > 600.0) {
    throw StepSizeError("simulate: mean growth exp(eta T / 2) overflows; reduce horizon");
  }
  return {steps, h};
}

inline double exact_sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) {
    s += x;
  }
  return s;
}

} // namespace detail

/**
 * Full-truncation Euler-Maruyama for
 *   dY_i = (eta / (2N)) S dt + N^{-1/2} sqrt(Y_i S) dB_i,   S = sum_j Y_j,
 * from the given initial positions. `noise(step, dB)` fills dB with the
 * Brownian increments (variance dt) of that step.
 */
template <class Noise>
ParticlePaths simulate_with_noise(const ModelParams &params, std::vector<double> y0,
                                  double dt, Noise &&noise,
                                  const SimulationOptions &opts = {}) {
  const std::size_t n = y0.size();
  if (n == 0 || n != params.n_particles) {
    throw DomainError("simulate: initial positions must have n_particles entries");
  }
  for (double y : y0) {
    if (!(y >= 0.0) || !std::isfinite(y)) {
      throw DomainError("simulate: initial positions must be finite and nonnegative");
    }
  }
  if (opts.record_stride == 0) {
    throw DomainError("simulate: record_stride must be positive");
  }
  const auto plan = detail::plan_steps(params, dt);
  const double inv_n = 1.0 / static_cast<double>(n);
  const double drift_coef = params.eta * 0.5 * inv_n * plan.dt;

  ParticlePaths out;
  out.n_particles = n;
  const std::size_t recorded = (plan.steps + opts.record_stride - 1) / opts.record_stride + 1;
  out.time_grid.reserve(recorded);
  out.positions.reserve(recorded * n);
  out.totals.reserve(recorded);

  std::vector<double> y = std::move(y0);
  double s = detail::exact_sum(y);
  auto record = [&](double t) {
    out.time_grid.push_back(t);
    out.positions.insert(out.positions.end(), y.begin(), y.end());
    out.totals.push_back(s);
  };
  record(0.0);

  std::vector<double> db(n);
  for (std::size_t k = 0; k < plan.steps; ++k) {
    if (!(s > 0.0)) {
      throw DegenerateStateError("simulate: total capitalization reached zero");
    }
    noise(k, std::span<double>(db));
    const double drift = drift_coef * s;
    const double vol = inv_n * s;
    for (std::size_t i = 0; i < n; ++i) {
      const double next = y[i] + drift + std::sqrt(std::max(y[i], 0.0) * vol) * db[i];
      y[i] = std::max(next, 0.0);
    }
    s = detail::exact_sum(y);
    if (!std::isfinite(s)) {
      throw StepSizeError("simulate: state overflowed; reduce dt or horizon");
    }
    const std::size_t done = k + 1;
    if (done == plan.steps) {
      record(params.horizon);
    } else if (done % opts.record_stride == 0) {
      record(static_cast<double>(done) * plan.dt);
    }
  }
  return out;
}

/// Gaussian increments of variance dt drawn from `rng`.
inline auto gaussian_noise(Rng &rng, double dt) {
  return [&rng, sd = std::sqrt(dt), dist = std::normal_distribution<double>()](
             std::size_t, std::span<double> db) mutable {
    for (double &v : db) {
      v = sd * dist(rng);
    }
  };
}

/// Simulates from explicit initial positions.
inline ParticlePaths simulate_from(const ModelParams &params, std::vector<double> y0,
                                   double dt, Rng &rng, const SimulationOptions &opts = {}) {
  const auto plan = detail::plan_steps(params, dt);
  return simulate_with_noise(params, std::move(y0), dt, gaussian_noise(rng, plan.dt), opts);
}

/// Validates (params, law), draws Y(0) i.i.d. from the law, then steps.
inline ParticlePaths simulate_system(const ModelParams &params, const InitialLaw &law,
                                     double dt, Rng &rng, const SimulationOptions &opts = {}) {
  require_valid(params, law);
  detail::plan_steps(params, dt);
  auto y0 = sample_initial(law, params.n_particles, rng);
  return simulate_from(params, std::move(y0), dt, rng, opts);
}

/// (rho^N(t_j), x) = S^Y(t_j) / N.
inline std::vector<double> mean_path(const ParticlePaths &paths) {
  const double n = static_cast<double>(paths.n_particles);
  std::vector<double> out(paths.totals.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = paths.totals[j] / n;
  }
  return out;
}

struct LogGrowth {
  std::vector<double> increments; // log Y_i(t_{j+1}) - log Y_i(t_j)
  std::vector<double> weights;    // alpha_i(t_j) at the start of each step
};

/// Per-step log increments of particle i and its market weight over the
/// node window [first, last].
inline LogGrowth log_growth_diagnostic(const ParticlePaths &paths, std::size_t i,
                                       std::size_t first = 0,
                                       std::size_t last = static_cast<std::size_t>(-1)) {
  if (i >= paths.n_particles) {
    throw DomainError("log_growth_diagnostic: particle index out of range");
  }
  last = std::min(last, paths.nodes() - 1);
  if (first > last) {
    throw DomainError("log_growth_diagnostic: empty window");
  }
  LogGrowth out;
  for (std::size_t j = first; j <= last; ++j) {
    if (!(paths.position(i, j) > 0.0)) {
      throw DomainError("log_growth_diagnostic: particle value is zero on the window");
    }
  }
  for (std::size_t j = first; j < last; ++j) {
    const double a = paths.position(i, j);
    const double b = paths.position(i, j + 1);
    out.increments.push_back(std::log(b) - std::log(a));
    out.weights.push_back(a / paths.totals[j]);
  }
  return out;
}

/// CSV: t, S, then Y_1..Y_k with k = min(N, max_particle_columns).
inline void write_paths_csv(std::ostream &os, const ParticlePaths &paths,
                            std::size_t max_particle_columns = 0) {
  const std::size_t k = std::min(paths.n_particles, max_particle_columns);
  const auto old_prec = os.precision(17);
  os << "t,S";
  for (std::size_t i = 0; i < k; ++i) {
    os << ",Y" << (i + 1);
  }
  os << '\n';
  for (std::size_t j = 0; j < paths.nodes(); ++j) {
    os << paths.time_grid[j] << ',' << paths.totals[j];
    for (std::size_t i = 0; i < k; ++i) {
      os << ',' << paths.position(i, j);
    }
    os << '\n';
  }
  os.precision(old_prec);
}

} // namespace vsmhl

#endif // VSMHL_PARTICLES_HPP
