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

#ifndef VSMHL_MODEL_HPP
#define VSMHL_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <boost/math/distributions/gamma.hpp>

#include "vsmhl/detail/quadrature.hpp"
#include "vsmhl/errors.hpp"
#include "vsmhl/rng.hpp"

namespace vsmhl {

/// Parameters of the volatility-stabilized particle system on the
/// rescaled clock Y_i(t) = X_i(t/N).
struct ModelParams {
  double eta = 2.0;             // drift parameter, must exceed 1
  std::size_t n_particles = 1;  // N
  double horizon = 1.0;         // T, rescaled-clock units
};

// Initial-law families. Each has closed-form first two moments.
struct PointMass {
  double x0 = 1.0;
};

struct GammaLaw {
  double shape = 1.0;
  double scale = 1.0;
};

struct UniformLaw {
  double a = 0.0;
  double b = 1.0;
};

struct Atom {
  double location = 0.0;
  double weight = 0.0;
};

struct DiscreteAtoms {
  std::vector<Atom> atoms;
};

using InitialLaw = std::variant<PointMass, GammaLaw, UniformLaw, DiscreteAtoms>;

struct Moments {
  double m1 = 0.0;
  double m2 = 0.0;
};

template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

inline bool is_atomic(const InitialLaw &law) {
  return std::holds_alternative<PointMass>(law) ||
         std::holds_alternative<DiscreteAtoms>(law);
}

namespace detail {

inline Moments raw_moments(const InitialLaw &law) {
  return std::visit(
      overloaded{
          [](const PointMass &p) { return Moments{p.x0, p.x0 * p.x0}; },
          [](const GammaLaw &g) {
            return Moments{g.shape * g.scale,
                           g.shape * (g.shape + 1.0) * g.scale * g.scale};
          },
          [](const UniformLaw &u) {
            return Moments{0.5 * (u.a + u.b),
                           (u.a * u.a + u.a * u.b + u.b * u.b) / 3.0};
          },
          [](const DiscreteAtoms &d) {
            Moments m;
            for (const auto &a : d.atoms) {
              m.m1 += a.weight * a.location;
              m.m2 += a.weight * a.location * a.location;
            }
            return m;
          }},
      law);
}

} // namespace detail

/// Every invariant the law itself violates (support, weights, moments).
inline std::vector<std::string> law_violations(const InitialLaw &law) {
  std::vector<std::string> out;
  std::visit(
      overloaded{
          [&](const PointMass &p) {
            if (!std::isfinite(p.x0) || p.x0 < 0.0) {
              out.emplace_back("support must lie in [0, inf): point mass location is negative");
            }
          },
          [&](const GammaLaw &g) {
            if (!(g.shape > 0.0) || !std::isfinite(g.shape)) {
              out.emplace_back("gamma shape must be positive");
            }
            if (!(g.scale > 0.0) || !std::isfinite(g.scale)) {
              out.emplace_back("gamma scale must be positive");
            }
          },
          [&](const UniformLaw &u) {
            if (!std::isfinite(u.a) || u.a < 0.0) {
              out.emplace_back("support must lie in [0, inf): uniform lower bound is negative");
            }
            if (!(u.b > u.a) || !std::isfinite(u.b)) {
              out.emplace_back("uniform bounds must satisfy a < b");
            }
          },
          [&](const DiscreteAtoms &d) {
            if (d.atoms.empty()) {
              out.emplace_back("discrete law needs at least one atom");
              return;
            }
            double total = 0.0;
            bool negative = false;
            bool bad_weight = false;
            for (const auto &a : d.atoms) {
              negative = negative || !std::isfinite(a.location) || a.location < 0.0;
              bad_weight = bad_weight || !(a.weight > 0.0) || !std::isfinite(a.weight);
              total += a.weight;
            }
            if (negative) {
              out.emplace_back("support must lie in [0, inf): atom location is negative");
            }
            if (bad_weight) {
              out.emplace_back("atom weights must be positive");
            }
            if (std::abs(total - 1.0) > 1e-12) {
              out.emplace_back("atom weights must sum to 1");
            }
          }},
      law);
  if (out.empty()) {
    const Moments m = detail::raw_moments(law);
    if (!std::isfinite(m.m1) || !std::isfinite(m.m2)) {
      out.emplace_back("moments must be finite");
    } else if (!(m.m1 > 0.0)) {
      out.emplace_back("m_lambda must be positive");
    }
  }
  return out;
}

/// First and second moments of the initial law. Throws ValidationError
/// naming the failed invariant when the law is inadmissible.
inline Moments moments(const InitialLaw &law) {
  auto v = law_violations(law);
  if (!v.empty()) {
    throw ValidationError(std::move(v));
  }
  return detail::raw_moments(law);
}

/// Every violated invariant of (params, law); empty means admissible.
inline std::vector<std::string> validate(const ModelParams &params,
                                         const InitialLaw &law) {
  std::vector<std::string> out;
  if (!(params.eta > 1.0) || !std::isfinite(params.eta)) {
    out.emplace_back("eta must exceed 1");
  }
  if (params.n_particles < 1) {
    out.emplace_back("n_particles must be at least 1");
  }
  if (!(params.horizon > 0.0) || !std::isfinite(params.horizon)) {
    out.emplace_back("horizon must be positive");
  }
  auto lv = law_violations(law);
  out.insert(out.end(), lv.begin(), lv.end());
  return out;
}

inline void require_valid(const ModelParams &params, const InitialLaw &law) {
  auto v = validate(params, law);
  if (!v.empty()) {
    throw ValidationError(std::move(v));
  }
}

/// n i.i.d. draws from the law. Deterministic for a given generator state.
inline std::vector<double> sample_initial(const InitialLaw &law, std::size_t n,
                                          Rng &rng) {
  if (n < 1) {
    throw DomainError("sample_initial: n must be at least 1");
  }
  moments(law); // validates
  std::vector<double> out(n);
  std::visit(
      overloaded{
          [&](const PointMass &p) { std::fill(out.begin(), out.end(), p.x0); },
          [&](const GammaLaw &g) {
            std::gamma_distribution<double> dist(g.shape, g.scale);
            for (auto &x : out) {
              x = dist(rng);
            }
          },
          [&](const UniformLaw &u) {
            std::uniform_real_distribution<double> dist(u.a, u.b);
            for (auto &x : out) {
              x = dist(rng);
            }
          },
          [&](const DiscreteAtoms &d) {
            std::vector<double> cum;
            cum.reserve(d.atoms.size());
            double acc = 0.0;
            for (const auto &a : d.atoms) {
              acc += a.weight;
              cum.push_back(acc);
            }
            std::uniform_real_distribution<double> unif(0.0, acc);
            for (auto &x : out) {
              const double u = unif(rng);
              auto it = std::upper_bound(cum.begin(), cum.end(), u);
              const auto k = std::min<std::size_t>(
                  static_cast<std::size_t>(it - cum.begin()), d.atoms.size() - 1);
              x = d.atoms[k].location;
            }
          }},
      law);
  return out;
}

struct SupportBounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// Interval carrying all but ~1e-16 of the law's mass.
inline SupportBounds effective_support(const InitialLaw &law) {
  return std::visit(
      overloaded{
          [](const PointMass &p) { return SupportBounds{p.x0, p.x0}; },
          [](const GammaLaw &g) {
            boost::math::gamma_distribution<double> dist(g.shape, g.scale);
            return SupportBounds{0.0, boost::math::quantile(boost::math::complement(dist, 1e-16))};
          },
          [](const UniformLaw &u) { return SupportBounds{u.a, u.b}; },
          [](const DiscreteAtoms &d) {
            SupportBounds s{d.atoms.front().location, d.atoms.front().location};
            for (const auto &a : d.atoms) {
              s.lo = std::min(s.lo, a.location);
              s.hi = std::max(s.hi, a.location);
            }
            return s;
          }},
      law);
}

/// Pairing (lambda, f) = \int f d lambda. Continuous laws use adaptive
/// quadrature; `cuts` are optional interior breakpoints where f has
/// structure (peaks, support edges).
template <class F>
double integrate_against(const InitialLaw &law, F &&f,
                         std::vector<double> cuts = {},
                         double tol = detail::kQuadTol) {
  return std::visit(
      overloaded{
          [&](const PointMass &p) { return static_cast<double>(f(p.x0)); },
          [&](const DiscreteAtoms &d) {
            double s = 0.0;
            for (const auto &a : d.atoms) {
              s += a.weight * f(a.location);
            }
            return s;
          },
          [&](const UniformLaw &u) {
            const double inv = 1.0 / (u.b - u.a);
            return inv * detail::integrate_pieces(
                             [&](double x) { return f(x); }, u.a, u.b, cuts, tol);
          },
          [&](const GammaLaw &g) {
            const double hi = effective_support(law).hi;
            const double log_norm = std::lgamma(g.shape) + g.shape * std::log(g.scale);
            auto integrand = [&](double x) {
              if (x <= 0.0) {
                return 0.0;
              }
              const double logpdf =
                  (g.shape - 1.0) * std::log(x) - x / g.scale - log_norm;
              return std::exp(logpdf) * f(x);
            };
            cuts.push_back(std::max(0.0, (g.shape - 1.0) * g.scale));
            cuts.push_back(g.shape * g.scale);
            return detail::integrate_pieces(integrand, 0.0, hi, cuts, tol);
          }},
      law);
}

/// Density of lambda for the continuous families, zero for atomic ones.
inline double initial_density(const InitialLaw &law, double x) {
  return std::visit(
      overloaded{[](const PointMass &) { return 0.0; },
                 [](const DiscreteAtoms &) { return 0.0; },
                 [&](const UniformLaw &u) {
                   return (x >= u.a && x <= u.b) ? 1.0 / (u.b - u.a) : 0.0;
                 },
                 [&](const GammaLaw &g) {
                   if (x <= 0.0) {
                     return 0.0;
                   }
                   boost::math::gamma_distribution<double> dist(g.shape, g.scale);
                   return boost::math::pdf(dist, x);
                 }},
      law);
}

/// CDF of lambda (right-continuous).
inline double initial_cdf(const InitialLaw &law, double x) {
  return std::visit(
      overloaded{[&](const PointMass &p) { return x >= p.x0 ? 1.0 : 0.0; },
                 [&](const DiscreteAtoms &d) {
                   double s = 0.0;
                   for (const auto &a : d.atoms) {
                     if (a.location <= x) {
                       s += a.weight;
                     }
                   }
                   return std::min(s, 1.0);
                 },
                 [&](const UniformLaw &u) {
                   return std::clamp((x - u.a) / (u.b - u.a), 0.0, 1.0);
                 },
                 [&](const GammaLaw &g) {
                   if (x <= 0.0) {
                     return 0.0;
                   }
                   boost::math::gamma_distribution<double> dist(g.shape, g.scale);
                   return boost::math::cdf(dist, x);
                 }},
      law);
}

inline std::string describe(const InitialLaw &law) {
  return std::visit(
      overloaded{[](const PointMass &p) { return "point(" + std::to_string(p.x0) + ")"; },
                 [](const GammaLaw &g) {
                   return "gamma(" + std::to_string(g.shape) + "," +
                          std::to_string(g.scale) + ")";
                 },
                 [](const UniformLaw &u) {
                   return "uniform(" + std::to_string(u.a) + "," + std::to_string(u.b) + ")";
                 },
                 [](const DiscreteAtoms &d) {
                   return "atoms[" + std::to_string(d.atoms.size()) + "]";
                 }},
      law);
}

} // namespace vsmhl

#endif // VSMHL_MODEL_HPP
