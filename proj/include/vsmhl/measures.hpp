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

#ifndef VSMHL_MEASURES_HPP
#define VSMHL_MEASURES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vsmhl/errors.hpp"
#include "vsmhl/limit_law.hpp"

namespace vsmhl {

/**
 * Probability measure on the line, stored either as weighted atoms or as a
 * nonnegative density sampled on an increasing node grid. For the grid form
 * the density is linear between nodes, so the CDF is the trapezoid
 * cumulative (quadratic inside a cell) and vanishes outside the grid.
 */
class Measure1D {
public:
  enum class Kind { atoms, grid_density };

  static constexpr double kMassTol = 1e-9;

  /// Atoms are sorted and coincident locations merged.
  static Measure1D atoms(std::vector<double> locations, std::vector<double> weights) {
    if (locations.empty() || locations.size() != weights.size()) {
      throw DomainError("Measure1D::atoms: need matching, nonempty location/weight lists");
    }
    std::vector<std::size_t> order(locations.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return locations[a] < locations[b]; });
    Measure1D m;
    m.kind_ = Kind::atoms;
    double total = 0.0;
    for (std::size_t k : order) {
      const double x = locations[k];
      const double w = weights[k];
      if (!std::isfinite(x) || !(w >= 0.0) || !std::isfinite(w)) {
        throw DomainError("Measure1D::atoms: locations must be finite, weights nonnegative");
      }
      if (!m.x_.empty() && m.x_.back() == x) {
        m.v_.back() += w;
      } else {
        m.x_.push_back(x);
        m.v_.push_back(w);
      }
      total += w;
    }
    if (std::abs(total - 1.0) > kMassTol) {
      throw DomainError("Measure1D::atoms: total mass must be 1");
    }
    m.build_cumulative();
    return m;
  }

  static Measure1D grid_density(std::vector<double> nodes, std::vector<double> values) {
    Measure1D m = unchecked_grid(std::move(nodes), std::move(values));
    if (std::abs(m.cum_.back() - 1.0) > kMassTol) {
      throw DomainError("Measure1D::grid_density: trapezoid mass must be 1");
    }
    return m;
  }

  /// Grid density rescaled to unit trapezoid mass.
  static Measure1D normalized_grid_density(std::vector<double> nodes,
                                           std::vector<double> values) {
    Measure1D m = unchecked_grid(std::move(nodes), std::move(values));
    const double mass = m.cum_.back();
    if (!(mass > 0.0)) {
      throw DomainError("Measure1D::normalized_grid_density: zero mass");
    }
    for (double &v : m.v_) {
      v /= mass;
    }
    m.build_cumulative();
    return m;
  }

  Kind kind() const noexcept { return kind_; }
  bool is_atoms() const noexcept { return kind_ == Kind::atoms; }

  /// Atom locations or grid nodes.
  std::span<const double> points() const noexcept { return x_; }
  /// Atom weights or node density values.
  std::span<const double> values() const noexcept { return v_; }

  double support_lo() const noexcept { return x_.front(); }
  double support_hi() const noexcept { return x_.back(); }

  /// Right-continuous CDF.
  double cdf(double x) const {
    if (x < x_.front()) {
      return 0.0;
    }
    if (x >= x_.back()) {
      return 1.0;
    }
    const auto j = static_cast<std::size_t>(
        std::upper_bound(x_.begin(), x_.end(), x) - x_.begin() - 1);
    if (kind_ == Kind::atoms) {
      return std::min(cum_[j], 1.0);
    }
    const double h = x_[j + 1] - x_[j];
    const double s = x - x_[j];
    const double val = cum_[j] + v_[j] * s + 0.5 * (v_[j + 1] - v_[j]) * s * s / h;
    return std::clamp(val, 0.0, 1.0);
  }

  /// Left limit F(x-).
  double cdf_left(double x) const {
    if (kind_ == Kind::grid_density) {
      return cdf(x);
    }
    if (x <= x_.front()) {
      return 0.0;
    }
    const auto j = static_cast<std::size_t>(
        std::lower_bound(x_.begin(), x_.end(), x) - x_.begin() - 1);
    return std::min(cum_[j], 1.0);
  }

  /// (mu, f) = \int f d mu.
  template <class F> double pair(F &&f) const {
    double s = 0.0;
    if (kind_ == Kind::atoms) {
      for (std::size_t k = 0; k < x_.size(); ++k) {
        s += v_[k] * f(x_[k]);
      }
      return s;
    }
    for (std::size_t j = 0; j + 1 < x_.size(); ++j) {
      s += 0.5 * (x_[j + 1] - x_[j]) * (v_[j] * f(x_[j]) + v_[j + 1] * f(x_[j + 1]));
    }
    return s;
  }

  double mean() const {
    if (kind_ == Kind::atoms) {
      return pair([](double x) { return x; });
    }
    // Exact first moment of the piecewise-linear density.
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < x_.size(); ++j) {
      const double a = x_[j];
      const double b = x_[j + 1];
      const double h = b - a;
      s += h / 6.0 * (v_[j] * (2.0 * a + b) + v_[j + 1] * (a + 2.0 * b));
    }
    return s;
  }

private:
  static Measure1D unchecked_grid(std::vector<double> nodes, std::vector<double> values) {
    if (nodes.size() < 2 || nodes.size() != values.size()) {
      throw DomainError("Measure1D::grid_density: need at least two nodes with values");
    }
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (!std::isfinite(nodes[j]) || !(values[j] >= 0.0) || !std::isfinite(values[j])) {
        throw DomainError("Measure1D::grid_density: nodes finite, values nonnegative");
      }
      if (j > 0 && !(nodes[j] > nodes[j - 1])) {
        throw DomainError("Measure1D::grid_density: nodes must be strictly increasing");
      }
    }
    Measure1D m;
    m.kind_ = Kind::grid_density;
    m.x_ = std::move(nodes);
    m.v_ = std::move(values);
    m.build_cumulative();
    return m;
  }

  void build_cumulative() {
    cum_.assign(x_.size(), 0.0);
    if (kind_ == Kind::atoms) {
      double acc = 0.0;
      for (std::size_t k = 0; k < x_.size(); ++k) {
        acc += v_[k];
        cum_[k] = acc;
      }
      return;
    }
    for (std::size_t j = 1; j < x_.size(); ++j) {
      cum_[j] = cum_[j - 1] + 0.5 * (x_[j] - x_[j - 1]) * (v_[j] + v_[j - 1]);
    }
  }

  Kind kind_ = Kind::atoms;
  std::vector<double> x_;
  std::vector<double> v_;
  std::vector<double> cum_; // CDF at each point (atoms: inclusive)
};

/// Uniform atoms 1/N at the given positions, duplicates merged.
inline Measure1D empirical(std::span<const double> positions) {
  if (positions.empty()) {
    throw DomainError("empirical: positions must be nonempty");
  }
  const double w = 1.0 / static_cast<double>(positions.size());
  return Measure1D::atoms(std::vector<double>(positions.begin(), positions.end()),
                          std::vector<double>(positions.size(), w));
}

/// Path of measures on an increasing time grid.
class MeasurePath {
public:
  MeasurePath(std::vector<double> times, std::vector<Measure1D> measures)
      : times_(std::move(times)), measures_(std::move(measures)) {
    if (times_.empty() || times_.size() != measures_.size()) {
      throw DomainError("MeasurePath: need one measure per time node");
    }
    for (std::size_t k = 1; k < times_.size(); ++k) {
      if (!(times_[k] > times_[k - 1])) {
        throw DomainError("MeasurePath: times must be strictly increasing");
      }
    }
  }

  std::span<const double> times() const noexcept { return times_; }
  const Measure1D &at(std::size_t k) const { return measures_.at(k); }
  std::size_t size() const noexcept { return times_.size(); }

  template <class F>
  double pair(std::size_t k, F &&f, double lo = -std::numeric_limits<double>::infinity(),
              double hi = std::numeric_limits<double>::infinity()) const {
    return measures_.at(k).pair([&](double x) { return (x >= lo && x <= hi) ? f(x) : 0.0; });
  }

private:
  std::vector<double> times_;
  std::vector<Measure1D> measures_;
};

enum class Metric { levy, wasserstein1 };

inline std::string to_string(Metric m) {
  return m == Metric::levy ? "levy" : "wasserstein1";
}

namespace detail {

inline std::vector<double> merged_points(const Measure1D &a, const Measure1D &b) {
  std::vector<double> pts(a.points().begin(), a.points().end());
  pts.insert(pts.end(), b.points().begin(), b.points().end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

} // namespace detail

/// W1 = \int |F_mu - F_nu| dx. Exact for two atomic measures; otherwise each
/// segment between breakpoints carries at most a quadratic difference and
/// is integrated with 3-point Gauss-Legendre (split when the sign flips).
inline double wasserstein1(const Measure1D &mu, const Measure1D &nu) {
  const auto pts = detail::merged_points(mu, nu);
  double total = 0.0;
  if (mu.is_atoms() && nu.is_atoms()) {
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      total += std::abs(mu.cdf(pts[k]) - nu.cdf(pts[k])) * (pts[k + 1] - pts[k]);
    }
    return total;
  }
  static constexpr std::array<double, 3> gx = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> gw = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  auto diff = [&](double x) { return mu.cdf(x) - nu.cdf(x); };
  auto gl3 = [&](double a, double b) {
    const double m = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s = 0.0;
    for (int q = 0; q < 3; ++q) {
      s += gw[q] * std::abs(diff(m + h * gx[q]));
    }
    return h * s;
  };
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double a = pts[k];
    const double b = pts[k + 1];
    const double w = b - a;
    const double da = diff(a + 1e-9 * w);
    const double db = diff(b - 1e-9 * w);
    if (da * db < 0.0) {
      constexpr int pieces = 16;
      for (int p = 0; p < pieces; ++p) {
        total += gl3(a + w * p / pieces, a + w * (p + 1) / pieces);
      }
    } else {
      total += gl3(a, b);
    }
  }
  return total;
}

namespace detail {

// Does eps satisfy F_mu(x - eps) - eps <= F_nu(x) <= F_mu(x + eps) + eps for
// every x? Both sides are checked on a uniform grid plus every breakpoint
// (shifted by eps), which makes the check exact for atomic measures.
inline bool levy_feasible(const Measure1D &mu, const Measure1D &nu, double eps,
                          std::size_t grid_points) {
  const double lo = std::min(mu.support_lo(), nu.support_lo()) - eps;
  const double hi = std::max(mu.support_hi(), nu.support_hi()) + eps;
  constexpr double slack = 1e-14;
  // Both sides are right-continuous, so each breakpoint is probed a hair to
  // its right; (a + eps) - eps need not round back to a.
  const double nudge = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});

  auto check = [&](double x) {
    if (mu.cdf(x - eps) - eps > nu.cdf(x) + slack) {
      return false;
    }
    if (nu.cdf(x) > mu.cdf(x + eps) + eps + slack) {
      return false;
    }
    return true;
  };
  // Two step functions: the breakpoints below already cover every extremum.
  const std::size_t sweep = mu.is_atoms() && nu.is_atoms() ? 0 : grid_points;
  for (std::size_t k = 0; k < sweep; ++k) {
    const double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid_points - 1);
    if (!check(x)) {
      return false;
    }
  }
  for (double a : mu.points()) {
    if (!check(a + eps + nudge) || !check(a - eps + nudge)) {
      return false;
    }
  }
  for (double b : nu.points()) {
    if (!check(b + nudge)) {
      return false;
    }
  }
  return true;
}

} // namespace detail

/// Levy distance by bisection on eps over the feasibility check above.
inline double levy(const Measure1D &mu, const Measure1D &nu, std::size_t grid_points = 4096,
                   double tol = 1e-10) {
  if (detail::levy_feasible(mu, nu, 0.0, grid_points)) {
    return 0.0;
  }
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (detail::levy_feasible(mu, nu, mid, grid_points)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

inline double distance(const Measure1D &mu, const Measure1D &nu, Metric metric) {
  return metric == Metric::levy ? levy(mu, nu) : wasserstein1(mu, nu);
}

/// sup over the shared time grid of the chosen metric.
inline double sup_distance(const MeasurePath &p, const MeasurePath &q, Metric metric) {
  if (p.size() != q.size()) {
    throw GridMismatchError("sup_distance: paths have different grid lengths");
  }
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double a = p.times()[k];
    const double b = q.times()[k];
    if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) {
      throw GridMismatchError("sup_distance: time grids differ");
    }
  }
  double best = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    best = std::max(best, distance(p.at(k), q.at(k), metric));
  }
  return best;
}

/// alpha_i = x_i / sum_j x_j.
inline std::vector<double> market_weights(std::span<const double> positions) {
  if (positions.empty()) {
    throw DomainError("market_weights: empty input");
  }
  double total = 0.0;
  for (double x : positions) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw DomainError("market_weights: positions must be finite and nonnegative");
    }
    total += x;
  }
  if (!(total > 0.0)) {
    throw DegenerateStateError("market_weights: all positions are zero");
  }
  std::vector<double> w(positions.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = positions[i] / total;
  }
  return w;
}

struct RankRow {
  std::size_t rank = 0;      // k, 1-based
  double observed = 0.0;     // k-th smallest position
  double limit_quantile = 0.0;
  double gap = 0.0;
};

/// Ranked positions against limit quantiles at plotting positions k/(N+1).
inline std::vector<RankRow> ranked_vs_limit(std::span<const double> positions,
                                            const CdfTable &table) {
  if (positions.empty()) {
    throw DomainError("ranked_vs_limit: positions must be nonempty");
  }
  std::vector<double> sorted(positions.begin(), positions.end());
  std::sort(sorted.begin(), sorted.end());
  const double denom = static_cast<double>(sorted.size() + 1);
  std::vector<RankRow> rows(sorted.size());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const double q = table.quantile(static_cast<double>(k + 1) / denom);
    rows[k] = {k + 1, sorted[k], q, std::abs(sorted[k] - q)};
  }
  return rows;
}

inline std::vector<RankRow> ranked_vs_limit(std::span<const double> positions,
                                            const LimitLaw &ll, double t) {
  if (!(t > 0.0)) {
    throw DomainError("ranked_vs_limit: t must be positive");
  }
  return ranked_vs_limit(positions, ll.cdf_table(t));
}

/// Mean absolute gap over ranks whose plotting position lies in [lo, hi].
inline double mean_rank_gap(std::span<const RankRow> rows, double lo = 0.1, double hi = 0.9) {
  const double denom = static_cast<double>(rows.size() + 1);
  double s = 0.0;
  std::size_t n = 0;
  for (const auto &r : rows) {
    const double p = static_cast<double>(r.rank) / denom;
    if (p >= lo && p <= hi) {
      s += r.gap;
      ++n;
    }
  }
  return n == 0 ? 0.0 : s / static_cast<double>(n);
}

/// Kolmogorov-Smirnov statistic sup |F_n - F| of a sample against `cdf`.
template <class Cdf> double ks_statistic(std::vector<double> sample, Cdf &&cdf) {
  if (sample.empty()) {
    throw DomainError("ks_statistic: empty sample");
  }
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// rho(t) as a Measure1D: the initial law at t = 0, else the density on
/// `nodes` points over [0, upper_cutoff(t)], renormalized.
inline Measure1D limit_measure(const LimitLaw &ll, double t, std::size_t nodes = 4001) {
  if (t == 0.0) {
    const InitialLaw &law = ll.law();
    if (const auto *p = std::get_if<PointMass>(&law)) {
      return Measure1D::atoms({p->x0}, {1.0});
    }
    if (const auto *d = std::get_if<DiscreteAtoms>(&law)) {
      std::vector<double> x;
      std::vector<double> w;
      for (const auto &a : d->atoms) {
        x.push_back(a.location);
        w.push_back(a.weight);
      }
      return Measure1D::atoms(std::move(x), std::move(w));
    }
    const auto s = effective_support(law);
    std::vector<double> x(nodes);
    std::vector<double> v(nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
      x[j] = s.lo + (s.hi - s.lo) * static_cast<double>(j) / static_cast<double>(nodes - 1);
      v[j] = initial_density(law, x[j]);
    }
    return Measure1D::normalized_grid_density(std::move(x), std::move(v));
  }
  const double top = ll.upper_cutoff(t);
  std::vector<double> x(nodes);
  std::vector<double> v(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    x[j] = top * static_cast<double>(j) / static_cast<double>(nodes - 1);
    v[j] = ll.density(t, x[j]);
  }
  return Measure1D::normalized_grid_density(std::move(x), std::move(v));
}

inline MeasurePath limit_measure_path(const LimitLaw &ll, std::vector<double> times,
                                      std::size_t nodes = 4001) {
  std::vector<Measure1D> ms;
  ms.reserve(times.size());
  for (double t : times) {
    ms.push_back(limit_measure(ll, t, nodes));
  }
  return MeasurePath(std::move(times), std::move(ms));
}

/// CSV: `location,weight` for atoms, `x,density` for grid densities.
inline void write_measure_csv(std::ostream &os, const Measure1D &m) {
  const auto old_prec = os.precision(17);
  os << (m.is_atoms() ? "location,weight\n" : "x,density\n");
  for (std::size_t k = 0; k < m.points().size(); ++k) {
    os << m.points()[k] << ',' << m.values()[k] << '\n';
  }
  os.precision(old_prec);
}

/// CSV `y,pdf,cdf` of rho(t) at the given points (t > 0).
inline void write_density_csv(std::ostream &os, const LimitLaw &ll, double t,
                              std::span<const double> ys) {
  if (!(t > 0.0)) {
    throw DomainError("write_density_csv: t must be positive");
  }
  const auto table = ll.cdf_table(t);
  const auto old_prec = os.precision(17);
  os << "y,pdf,cdf\n";
  for (double y : ys) {
    os << y << ',' << ll.density(t, y) << ',' << table(y) << '\n';
  }
  os.precision(old_prec);
}

} // namespace vsmhl

#endif // VSMHL_MEASURES_HPP
