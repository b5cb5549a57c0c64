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

#ifndef VSMHL_LIMIT_LAW_HPP
#define VSMHL_LIMIT_LAW_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "vsmhl/bessel.hpp"
#include "vsmhl/detail/quadrature.hpp"
#include "vsmhl/errors.hpp"
#include "vsmhl/model.hpp"
#include "vsmhl/rng.hpp"

namespace vsmhl {

class CdfTable;

/**
 * The hydrodynamic limit rho(t) of the rescaled empirical measure.
 *
 * rho(t) is the law of Z(J(t)), where dZ = (eta/2) dt + sqrt(Z) dB,
 * Z(0) ~ lambda, and J(t) = (2 m / eta) (e^{eta t / 2} - 1). Since 4Z is a
 * squared Bessel process of dimension 2 eta, the one-dimensional marginal
 * started from x is (J/4) times a noncentral chi-square with 2 eta degrees
 * of freedom and noncentrality 4x/J. Its density involves the modified
 * Bessel function I_{eta-1}; for t > 0 rho(t) is absolutely continuous.
 */
class LimitLaw {
public:
  // Inner (over lambda) and outer (over y) tolerances for continuous initial
  // laws. The outer one must sit above the inner integral's noise floor or
  // the adaptive outer rule keeps subdividing.
  static constexpr double kMixtureTol = 1e-13;
  static constexpr double kOuterTol = 1e-10;

  LimitLaw(double eta, InitialLaw law) : eta_(eta), law_(std::move(law)) {
    std::vector<std::string> v;
    if (!(eta_ > 1.0) || !std::isfinite(eta_)) {
      v.emplace_back("eta must exceed 1");
    }
    auto lv = law_violations(law_);
    v.insert(v.end(), lv.begin(), lv.end());
    if (!v.empty()) {
      throw ValidationError(std::move(v));
    }
    const Moments m = moments(law_);
    m_lambda_ = m.m1;
    m2_lambda_ = m.m2;
    support_ = effective_support(law_);
  }

  double eta() const noexcept { return eta_; }
  double m_lambda() const noexcept { return m_lambda_; }
  const InitialLaw &law() const noexcept { return law_; }

  /// J(t) = \int_0^t m e^{eta s / 2} ds.
  double time_change(double t) const {
    if (!(t >= 0.0)) {
      throw DomainError("time_change: t must be nonnegative");
    }
    return 2.0 * m_lambda_ / eta_ * std::expm1(0.5 * eta_ * t);
  }

  /// m e^{eta t / 2}.
  double mean(double t) const {
    if (!(t >= 0.0)) {
      throw DomainError("mean: t must be nonnegative");
    }
    return m_lambda_ * std::exp(0.5 * eta_ * t);
  }

  double variance(double t) const {
    const double j = time_change(t);
    return m_lambda_ * j + 0.25 * eta_ * j * j + (m2_lambda_ - m_lambda_ * m_lambda_);
  }

  /// Density at y of Z(J) given Z(0) = x.
  double transition_density(double x, double y, double clock) const {
    if (y <= 0.0 || clock <= 0.0) {
      return 0.0;
    }
    const double nu = eta_ - 1.0;
    if (x <= 0.0) {
      // x -> 0 limit: Gamma(eta, J/2).
      return std::exp(eta_ * std::log(2.0 / clock) + nu * std::log(y) -
                      2.0 * y / clock - std::lgamma(eta_));
    }
    const double z = 4.0 * std::sqrt(x * y) / clock;
    const double gap = std::sqrt(x) - std::sqrt(y);
    const double log_p = std::log(2.0 / clock) + 0.5 * nu * (std::log(y) - std::log(x)) -
                         2.0 * gap * gap / clock + log_bessel_i_scaled(nu, z);
    return std::exp(log_p);
  }

  /// Density of rho(t) at y, mixing the transition density over lambda.
  double density(double t, double y) const {
    if (!(t > 0.0)) {
      throw DomainError("density: t must be positive");
    }
    if (!(y >= 0.0)) {
      throw DomainError("density: y must be nonnegative");
    }
    const double clock = time_change(t);
    auto kernel = [&](double x) { return transition_density(x, y, clock); };
    if (is_atomic(law_)) {
      return integrate_against(law_, kernel);
    }
    const double s = std::sqrt(std::max(y, clock) * clock) + clock;
    return integrate_against(law_, kernel, {y - 8.0 * s, y, y + 8.0 * s}, kMixtureTol);
  }

  /// A point beyond which rho(t) has mass below ~1e-15, from the
  /// noncentral chi-square tail bound P(X >= k + b + 2 sqrt((k + 2b)u) + 2u)
  /// <= e^{-u} applied at the top of lambda's effective support.
  double upper_cutoff(double t) const {
    if (t <= 0.0) {
      return support_.hi;
    }
    const double clock = time_change(t);
    constexpr double u = 36.0;
    const double dof = 2.0 * eta_;
    const double nc = 4.0 * support_.hi / clock;
    const double g = dof + nc + 2.0 * std::sqrt((dof + 2.0 * nc) * u) + 2.0 * u;
    return 0.25 * clock * g;
  }

  /// Integral of f against rho(t) over [lo, hi]; at t = 0 this is the
  /// pairing with lambda itself.
  template <class F>
  double pair(double t, F &&f, double lo = 0.0,
              double hi = std::numeric_limits<double>::infinity()) const {
    if (!(t >= 0.0)) {
      throw DomainError("pair: t must be nonnegative");
    }
    lo = std::max(lo, 0.0);
    if (t == 0.0) {
      auto restricted = [&](double x) { return (x >= lo && x <= hi) ? f(x) : 0.0; };
      return integrate_against(law_, restricted, {lo, hi});
    }
    hi = std::min(hi, upper_cutoff(t));
    if (!(hi > lo)) {
      return 0.0;
    }
    const double clock = time_change(t);
    if (is_atomic(law_)) {
      auto one_atom = [&](double x) {
        return detail::integrate_pieces(
            [&](double y) { return f(y) * transition_density(x, y, clock); }, lo, hi,
            peak_cuts(x, clock));
      };
      return integrate_against(law_, one_atom);
    }
    const double m = mean(t);
    const double sd = std::sqrt(variance(t));
    return detail::integrate_pieces([&](double y) { return f(y) * density(t, y); }, lo,
                                    hi, {m - 4.0 * sd, m, m + 4.0 * sd}, kOuterTol);
  }

  double cdf(double t, double y) const {
    if (!(t > 0.0)) {
      throw DomainError("cdf: t must be positive");
    }
    if (std::isnan(y)) {
      throw DomainError("cdf: y is NaN");
    }
    if (y <= 0.0) {
      return 0.0;
    }
    const double p = pair(t, [](double) { return 1.0; }, 0.0, y);
    return std::clamp(p, 0.0, 1.0);
  }

  /// Inverse of cdf by bracketed root finding on [0, upper_cutoff(t)].
  double quantile(double t, double p) const {
    if (!(t > 0.0)) {
      throw DomainError("quantile: t must be positive");
    }
    if (!(p > 0.0 && p < 1.0)) {
      throw DomainError("quantile: p must lie in (0, 1)");
    }
    auto g = [&](double y) { return cdf(t, y) - p; };
    double lo = 0.0;
    double hi = upper_cutoff(t);
    std::uintmax_t iters = 300;
    const auto r = boost::math::tools::toms748_solve(
        g, lo, hi, -p, 1.0 - p, boost::math::tools::eps_tolerance<double>(44), iters);
    return 0.5 * (r.first + r.second);
  }

  /// Exact draws: x ~ lambda, then (J/4) * chi'^2(2 eta, 4x/J) sampled as a
  /// Poisson(2x/J) mixture of Gamma(eta + K, 2) variables.
  std::vector<double> sample(double t, std::size_t n, Rng &rng) const {
    if (!(t > 0.0)) {
      throw DomainError("sample: t must be positive");
    }
    const double clock = time_change(t);
    std::vector<double> out = sample_initial(law_, n, rng);
    for (double &y : out) {
      const double half_nc = 2.0 * y / clock;
      double shape = eta_;
      if (half_nc > 0.0) {
        std::poisson_distribution<long long> poisson(half_nc);
        shape += static_cast<double>(poisson(rng));
      }
      std::gamma_distribution<double> gamma(shape, 2.0);
      y = 0.25 * clock * gamma(rng);
    }
    return out;
  }

  CdfTable cdf_table(double t, std::size_t cells = 4096) const;

private:
  std::vector<double> peak_cuts(double x, double clock) const {
    const double m = x + 0.5 * eta_ * clock;
    const double sd = std::sqrt(x * clock + 0.25 * eta_ * clock * clock);
    return {m - 8.0 * sd, m - 2.0 * sd, m, m + 2.0 * sd, m + 8.0 * sd};
  }

  double eta_;
  InitialLaw law_;
  double m_lambda_ = 0.0;
  double m2_lambda_ = 0.0;
  SupportBounds support_;
};

/**
 * Tabulated CDF of rho(t) on [0, upper_cutoff(t)] for bulk evaluation.
 *
 * Nodes are graded quadratically, y_j = top (j/M)^2, since the density
 * behaves like y^{eta-1} at the origin. Node values are cumulative per-cell
 * integrals of the density (adaptive near the origin, 10-point Gauss
 * elsewhere); between nodes the CDF is the cubic Hermite interpolant with
 * the exact density as slope, except in the first cell, where it is the
 * power law c y^p matching the value and slope at the cell's right node.
 */
class CdfTable {
public:
  CdfTable(const LimitLaw &ll, double t, std::size_t cells) {
    if (!(t > 0.0)) {
      throw DomainError("cdf_table: t must be positive");
    }
    if (cells < 2) {
      throw DomainError("cdf_table: need at least two cells");
    }
    top_ = ll.upper_cutoff(t);
    cells_ = cells;
    nodes_.resize(cells + 1);
    cdf_.resize(cells + 1);
    pdf_.resize(cells + 1);
    for (std::size_t j = 0; j <= cells; ++j) {
      const double u = static_cast<double>(j) / static_cast<double>(cells);
      nodes_[j] = j == cells ? top_ : top_ * u * u;
      pdf_[j] = ll.density(t, nodes_[j]);
    }
    auto pdf = [&](double y) { return ll.density(t, y); };
    cdf_[0] = 0.0;
    for (std::size_t j = 0; j < cells; ++j) {
      const double piece =
          j < kAdaptiveCells
              ? detail::integrate(pdf, nodes_[j], nodes_[j + 1], LimitLaw::kOuterTol)
              : detail::gauss10(pdf, nodes_[j], nodes_[j + 1]);
      cdf_[j + 1] = cdf_[j] + piece;
    }
    power_ = cdf_[1] > 0.0 ? nodes_[1] * pdf_[1] / cdf_[1] : 0.0;
  }

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> node_cdf() const noexcept { return cdf_; }
  std::span<const double> node_pdf() const noexcept { return pdf_; }
  double total_mass() const noexcept { return cdf_.back(); }

  double operator()(double y) const {
    if (y <= 0.0) {
      return 0.0;
    }
    if (y >= nodes_.back()) {
      return std::min(1.0, cdf_.back());
    }
    const std::size_t j = cell_of(y);
    return std::clamp(interpolate(j, (y - nodes_[j]) / width(j)), 0.0, 1.0);
  }

  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) {
      throw DomainError("quantile: p must lie in (0, 1)");
    }
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), p);
    if (it == cdf_.end()) {
      return nodes_.back();
    }
    const auto j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cdf_.begin() - 1, 0));
    double lo = 0.0;
    double hi = 1.0;
    for (int iter = 0; iter < 60; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (interpolate(j, mid) < p) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return nodes_[j] + 0.5 * (lo + hi) * width(j);
  }

private:
  static constexpr std::size_t kAdaptiveCells = 64;

  double width(std::size_t j) const { return nodes_[j + 1] - nodes_[j]; }

  std::size_t cell_of(double y) const {
    auto j = static_cast<std::size_t>(static_cast<double>(cells_) * std::sqrt(y / top_));
    j = std::min(j, cells_ - 1);
    while (j > 0 && y < nodes_[j]) {
      --j;
    }
    while (j + 1 < cells_ && y >= nodes_[j + 1]) {
      ++j;
    }
    return j;
  }

  double interpolate(std::size_t j, double s) const {
    if (j == 0 && power_ > 0.0) {
      return cdf_[1] * std::pow(s, power_);
    }
    const double h = width(j);
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * cdf_[j] + h10 * h * pdf_[j] + h01 * cdf_[j + 1] + h11 * h * pdf_[j + 1];
  }

  double top_ = 0.0;
  std::size_t cells_ = 0;
  double power_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> cdf_;
  std::vector<double> pdf_;
};

inline CdfTable LimitLaw::cdf_table(double t, std::size_t cells) const {
  return CdfTable(*this, t, cells);
}

/// rho(t) sampled at a fixed time grid, pairable against test functions.
class AnalyticPath {
public:
  AnalyticPath(LimitLaw ll, std::vector<double> times)
      : ll_(std::move(ll)), times_(std::move(times)) {}

  std::span<const double> times() const noexcept { return times_; }
  const LimitLaw &law() const noexcept { return ll_; }

  template <class F>
  double pair(std::size_t k, F &&f, double lo = 0.0,
              double hi = std::numeric_limits<double>::infinity()) const {
    return ll_.pair(times_.at(k), std::forward<F>(f), lo, hi);
  }

private:
  LimitLaw ll_;
  std::vector<double> times_;
};

} // namespace vsmhl

#endif // VSMHL_LIMIT_LAW_HPP
