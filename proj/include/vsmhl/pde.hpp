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


#ifndef VSMHL_PDE_HPP
#define VSMHL_PDE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vsmhl/errors.hpp"
#include "vsmhl/limit_law.hpp"
#include "vsmhl/measures.hpp"
#include "vsmhl/model.hpp"

namespace vsmhl {

struct SolverGrid {
  double x_max = 30.0;
  std::size_t nx = 1200; // cells
  std::size_t nt = 800;  // time steps to the horizon
};

inline std::vector<std::string> grid_violations(const SolverGrid &g) {
  std::vector<std::string> v;
  if (!(g.x_max > 0.0) || !std::isfinite(g.x_max)) {
    v.emplace_back("grid x_max must be positive");
  }
  if (g.nx < 16) {
    v.emplace_back("grid nx must be at least 16");
  }
  if (g.nt < 16) {
    v.emplace_back("grid nt must be at least 16");
  }
  return v;
}

struct PdeCoefficients {
  double eta = 2.0;
  double m_lambda = 1.0;
};

/// Cell-average densities on (nt + 1) time levels, row-major by time.
class DensityTrajectory {
public:
  DensityTrajectory(SolverGrid grid, double horizon)
      : grid_(grid), horizon_(horizon), values_((grid.nt + 1) * grid.nx, 0.0) {}

  const SolverGrid &grid() const noexcept { return grid_; }
  double horizon() const noexcept { return horizon_; }
  double dx() const noexcept { return grid_.x_max / static_cast<double>(grid_.nx); }
  double dt() const noexcept { return horizon_ / static_cast<double>(grid_.nt); }
  double time(std::size_t n) const noexcept {
    return n == grid_.nt ? horizon_ : static_cast<double>(n) * dt();
  }
  double x(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * dx(); }
  std::size_t levels() const noexcept { return grid_.nt + 1; }

  std::span<double> row(std::size_t n) { return {values_.data() + n * grid_.nx, grid_.nx}; }
  std::span<const double> row(std::size_t n) const {
    return {values_.data() + n * grid_.nx, grid_.nx};
  }
  std::span<const double> values() const noexcept { return values_; }

  std::vector<double> times() const {
    std::vector<double> t(levels());
    for (std::size_t n = 0; n < t.size(); ++n) {
      t[n] = time(n);
    }
    return t;
  }

  double mass(std::size_t n) const {
    double s = 0.0;
    for (double v : row(n)) {
      s += v;
    }
    return s * dx();
  }

  double mean(std::size_t n) const {
    const auto r = row(n);
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      s += x(i) * r[i];
    }
    return s * dx();
  }

  /// max_n |mass(n) - mass(0)|.
  double mass_drift() const {
    const double m0 = mass(0);
    double d = 0.0;
    for (std::size_t n = 1; n < levels(); ++n) {
      d = std::max(d, std::abs(mass(n) - m0));
    }
    return d;
  }

  double min_value() const { return *std::min_element(values_.begin(), values_.end()); }

  /// Midpoint pairing sum_i f(x_i) rho_i dx over cells with centre in [lo, hi].
  template <class F>
  double pair(std::size_t n, F &&f, double lo = -std::numeric_limits<double>::infinity(),
              double hi = std::numeric_limits<double>::infinity()) const {
    const auto r = row(n);
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double xi = x(i);
      if (xi >= lo && xi <= hi) {
        s += f(xi) * r[i];
      }
    }
    return s * dx();
  }

  /// Level n as a grid-density measure at the cell centres (negatives clipped).
  Measure1D measure(std::size_t n) const {
    const auto r = row(n);
    std::vector<double> xs(r.size());
    std::vector<double> vs(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      xs[i] = x(i);
      vs[i] = std::max(r[i], 0.0);
    }
    return Measure1D::normalized_grid_density(std::move(xs), std::move(vs));
  }

  /// Advisory explicit-scheme ratio at the final (largest) coefficient:
  /// max(advective a eta/2 dt/dx, diffusive a x_max dt / (2 dx^2)).
  double cfl_ratio = 0.0;

private:
  SolverGrid grid_;
  double horizon_;
  std::vector<double> values_;
};

/// The initial law as a DiscreteAtoms law at the cell centres: atoms are
/// replaced by Gaussians of width 2 dx, continuous laws by their cell
/// masses, and the result is renormalized on [0, x_max].
inline DiscreteAtoms mollified_initial_law(const InitialLaw &law, const SolverGrid &grid) {
  const auto gv = grid_violations(grid);
  if (!gv.empty()) {
    throw ValidationError(gv);
  }
  const double dx = grid.x_max / static_cast<double>(grid.nx);
  std::vector<double> mass(grid.nx, 0.0);
  auto add_gaussian = [&](double loc, double w) {
    const double sigma = 2.0 * dx;
    auto phi = [&](double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); };
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const double a = static_cast<double>(i) * dx;
      mass[i] += w * (phi((a + dx - loc) / sigma) - phi((a - loc) / sigma));
    }
  };
  if (const auto *p = std::get_if<PointMass>(&law)) {
    add_gaussian(p->x0, 1.0);
  } else if (const auto *d = std::get_if<DiscreteAtoms>(&law)) {
    for (const auto &a : d->atoms) {
      add_gaussian(a.location, a.weight);
    }
  } else {
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const double a = static_cast<double>(i) * dx;
      mass[i] = initial_cdf(law, a + dx) - initial_cdf(law, a);
    }
  }
  double total = 0.0;
  for (double m : mass) {
    total += m;
  }
  if (!(total > 0.0)) {
    throw ConfigError("mollified_initial_law: no initial mass inside [0, x_max]");
  }
  DiscreteAtoms out;
  for (std::size_t i = 0; i < grid.nx; ++i) {
    if (mass[i] > 0.0) {
      out.atoms.push_back({(static_cast<double>(i) + 0.5) * dx, mass[i] / total});
    }
  }
  return out;
}

namespace detail {

// Thomas algorithm for lower[i] u[i-1] + diag[i] u[i] + upper[i] u[i+1] = rhs[i].
inline void thomas_solve(std::vector<double> &lower, std::vector<double> &diag,
                         std::vector<double> &upper, std::span<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (diag[i - 1] == 0.0) {
      throw SolverError("pde solve: singular tridiagonal system");
    }
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  if (diag[n - 1] == 0.0) {
    throw SolverError("pde solve: singular tridiagonal system");
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
  }
}

} // namespace detail

/// Face-flux discretization. `fitted` is the exponentially fitted
/// (Scharfetter-Gummel) flux for F/a = (x/2) rho_x - ((eta-1)/2) rho; it is
/// second order where diffusion dominates and falls back to upwinding near
/// x = 0. `upwind` takes the centred difference of x rho and upwinds the
/// whole -(eta/2) rho term from the left cell.
enum class FluxScheme { fitted, upwind };

namespace detail {

// z / (e^z - 1), with B(0) = 1.
inline double bernoulli_fn(double z) {
  return std::abs(z) < 1e-10 ? 1.0 - 0.5 * z : z / std::expm1(z);
}

} // namespace detail

/**
 * Backward-Euler solve of rho_t = d/dx F with
 *   F = a(t) [ (1/2) d/dx(x rho) - (eta/2) rho ],   a(t) = m exp(eta t / 2),
 * from the given initial cell densities, with no validation of the
 * coefficients. The face flux is F_{i+1/2} = a (alpha_i rho_{i+1} - beta_i rho_i)
 * with alpha, beta >= 0 from `scheme`; both boundary fluxes are zero, so
 * every column of the step matrix sums to one.
 */
inline DensityTrajectory solve_with(const PdeCoefficients &c, std::span<const double> initial,
                                    const SolverGrid &grid, double horizon,
                                    FluxScheme scheme = FluxScheme::fitted) {
  const auto gv = grid_violations(grid);
  if (!gv.empty()) {
    throw ValidationError(gv);
  }
  if (initial.size() != grid.nx) {
    throw DomainError("solve: initial data must have nx cells");
  }
  if (!(horizon > 0.0)) {
    throw DomainError("solve: horizon must be positive");
  }
  DensityTrajectory traj(grid, horizon);
  std::copy(initial.begin(), initial.end(), traj.row(0).begin());

  const std::size_t nx = grid.nx;
  const double dx = traj.dx();
  const double r = traj.dt() / dx;

  std::vector<double> alpha(nx, 0.0);
  std::vector<double> beta(nx, 0.0);
  for (std::size_t i = 0; i + 1 < nx; ++i) {
    if (scheme == FluxScheme::upwind) {
      alpha[i] = 0.5 * traj.x(i + 1) / dx;
      beta[i] = 0.5 * traj.x(i) / dx + 0.5 * c.eta;
    } else {
      const double face = static_cast<double>(i + 1) * dx;
      const double d = 0.5 * face / dx;
      const double peclet = (c.eta - 1.0) * dx / face;
      alpha[i] = d * detail::bernoulli_fn(peclet);
      beta[i] = d * detail::bernoulli_fn(-peclet);
    }
  }

  std::vector<double> lower(nx);
  std::vector<double> diag(nx);
  std::vector<double> upper(nx);
  for (std::size_t n = 0; n < grid.nt; ++n) {
    const double ra = r * c.m_lambda * std::exp(0.5 * c.eta * traj.time(n + 1));
    for (std::size_t i = 0; i < nx; ++i) {
      lower[i] = 0.0;
      upper[i] = 0.0;
      diag[i] = 1.0;
      if (i + 1 < nx) {
        upper[i] -= ra * alpha[i];
        diag[i] += ra * beta[i];
      }
      if (i > 0) {
        diag[i] += ra * alpha[i - 1];
        lower[i] -= ra * beta[i - 1];
      }
    }
    auto next = traj.row(n + 1);
    const auto prev = traj.row(n);
    std::copy(prev.begin(), prev.end(), next.begin());
    detail::thomas_solve(lower, diag, upper, next);
  }
  const double a_end = c.m_lambda * std::exp(0.5 * c.eta * horizon);
  traj.cfl_ratio = std::max(a_end * 0.5 * c.eta * traj.dt() / dx,
                            a_end * grid.x_max * traj.dt() / (2.0 * dx * dx));
  return traj;
}

/// Mass of rho(T) beyond x_max, from the analytic law.
inline double truncation_mass(const LimitLaw &ll, double horizon, double x_max) {
  return ll.pair(horizon, [](double) { return 1.0; }, x_max);
}

/// Validated solve: mollified initial data, and rho(T) must put less than
/// 1e-6 mass beyond x_max.
inline DensityTrajectory solve(const ModelParams &params, const InitialLaw &law,
                               const SolverGrid &grid, FluxScheme scheme = FluxScheme::fitted) {
  require_valid(params, law);
  const auto gv = grid_violations(grid);
  if (!gv.empty()) {
    throw ValidationError(gv);
  }
  const LimitLaw ll(params.eta, law);
  const double tail = truncation_mass(ll, params.horizon, grid.x_max);
  if (!(tail < 1e-6)) {
    throw ConfigError("solve: mass beyond x_max at the horizon is " + std::to_string(tail) +
                      " (must be below 1e-6); increase x_max");
  }
  const auto start = mollified_initial_law(law, grid);
  const double dx = grid.x_max / static_cast<double>(grid.nx);
  std::vector<double> init(grid.nx, 0.0);
  for (const auto &a : start.atoms) {
    const auto i = static_cast<std::size_t>(a.location / dx);
    init[std::min(i, grid.nx - 1)] += a.weight / dx;
  }
  return solve_with({params.eta, ll.m_lambda()}, init, grid, params.horizon, scheme);
}

/// sum_i |rho_i(t_n) - density(t_n, x_i)| dx against `ll`.
inline double l1_error(const DensityTrajectory &traj, std::size_t n, const LimitLaw &ll) {
  const double t = traj.time(n);
  if (!(t > 0.0)) {
    throw DomainError("l1_error: level must have t > 0");
  }
  const auto r = traj.row(n);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    s += std::abs(r[i] - ll.density(t, traj.x(i)));
  }
  return s * traj.dx();
}

/// CSV rows (t, x, rho) for every `time_stride`-th level (and the last),
/// negatives clipped to zero.
inline void write_trajectory_csv(std::ostream &os, const DensityTrajectory &traj,
                                 std::size_t time_stride = 1) {
  time_stride = std::max<std::size_t>(time_stride, 1);
  const auto old_prec = os.precision(17);
  os << "t,x,rho\n";
  for (std::size_t n = 0; n < traj.levels(); ++n) {
    if (n % time_stride != 0 && n + 1 != traj.levels()) {
      continue;
    }
    const auto r = traj.row(n);
    for (std::size_t i = 0; i < r.size(); ++i) {
      os << traj.time(n) << ',' << traj.x(i) << ',' << std::max(r[i], 0.0) << '\n';
    }
  }
  os.precision(old_prec);
}

/// Raw little-endian float64 dump, row-major (time, cell), plus a JSON
/// sidecar `<path>.json` describing the layout.
inline void write_trajectory_binary(const std::string &path, const DensityTrajectory &traj) {
  {
    std::ofstream bin(path, std::ios::binary);
    if (!bin) {
      throw Error("write_trajectory_binary: cannot open " + path);
    }
    const auto v = traj.values();
    bin.write(reinterpret_cast<const char *>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  std::ofstream meta(path + ".json");
  meta.precision(17);
  meta << "{\n  \"format\": \"float64-le row-major\",\n"
       << "  \"rows\": " << traj.levels() << ",\n"
       << "  \"cols\": " << traj.grid().nx << ",\n"
       << "  \"x_max\": " << traj.grid().x_max << ",\n"
       << "  \"nx\": " << traj.grid().nx << ",\n"
       << "  \"nt\": " << traj.grid().nt << ",\n"
       << "  \"horizon\": " << traj.horizon() << ",\n"
       << "  \"x_first_centre\": " << traj.x(0) << ",\n"
       << "  \"dx\": " << traj.dx() << "\n}\n";
}

} // namespace vsmhl

#endif // VSMHL_PDE_HPP
