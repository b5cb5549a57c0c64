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


#ifndef VSMHL_WEAK_FORM_HPP
#define VSMHL_WEAK_FORM_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "vsmhl/errors.hpp"

namespace vsmhl {

struct TestFunction {
  std::string name;
  std::function<double(double)> g;
  std::function<double(double)> dg;
  std::function<double(double)> d2g;
  double support_lo = -std::numeric_limits<double>::infinity();
  double support_hi = std::numeric_limits<double>::infinity();
};

namespace detail {

inline std::string short_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

} // namespace detail

inline TestFunction gaussian_test_function(double c, double sigma) {
  const double s2 = sigma * sigma;
  auto g = [=](double x) { return std::exp(-(x - c) * (x - c) / (2.0 * s2)); };
  return {"gauss(c=" + detail::short_number(c) + ",s=" + detail::short_number(sigma) + ")",
          g,
          [=](double x) { return -(x - c) / s2 * g(x); },
          [=](double x) {
            const double u = x - c;
            return (u * u / (s2 * s2) - 1.0 / s2) * g(x);
          }};
}

/// exp(1 - 1/(1 - u^2)) with u = (x - c)/w, zero outside (c - w, c + w).
inline TestFunction bump_test_function(double c, double w) {
  auto phi = [=](double x, int order) {
    const double u = (x - c) / w;
    const double q = 1.0 - u * u;
    if (!(q > 0.0)) {
      return 0.0;
    }
    const double v = std::exp(1.0 - 1.0 / q);
    if (order == 0) {
      return v;
    }
    if (order == 1) {
      return v * (-2.0 * u / (q * q)) / w;
    }
    const double q2 = q * q;
    return v * (4.0 * u * u / (q2 * q2) - 2.0 / q2 - 8.0 * u * u / (q2 * q)) / (w * w);
  };
  return {"bump(c=" + detail::short_number(c) + ",w=" + detail::short_number(w) + ")",
          [=](double x) { return phi(x, 0); },
          [=](double x) { return phi(x, 1); },
          [=](double x) { return phi(x, 2); },
          c - w,
          c + w};
}

/// Three Gaussians and two compactly supported bumps.
inline std::vector<TestFunction> test_function_bank() {
  return {gaussian_test_function(1.0, 0.5), gaussian_test_function(2.0, 1.0),
          gaussian_test_function(5.0, 2.0), bump_test_function(1.0, 1.0),
          bump_test_function(3.0, 2.0)};
}

struct WeakFormCoefficients {
  double eta = 2.0;
  double m_lambda = 1.0;
};

namespace detail {

// Weights of composite Simpson on the nonuniform nodes t[0..k]; an odd
// final interval is integrated with the parabola through its last three nodes.
inline std::vector<double> simpson_weights(std::span<const double> t, std::size_t k) {
  std::vector<double> w(k + 1, 0.0);
  if (k == 0) {
    return w;
  }
  if (k == 1) {
    w[0] = w[1] = 0.5 * (t[1] - t[0]);
    return w;
  }
  const std::size_t paired = (k % 2 == 0) ? k : k - 1;
  for (std::size_t j = 0; j + 2 <= paired; j += 2) {
    const double h0 = t[j + 1] - t[j];
    const double h1 = t[j + 2] - t[j + 1];
    const double s = (h0 + h1) / 6.0;
    w[j] += s * (2.0 - h1 / h0);
    w[j + 1] += s * (h0 + h1) * (h0 + h1) / (h0 * h1);
    w[j + 2] += s * (2.0 - h0 / h1);
  }
  if (paired != k) {
    const double h0 = t[k - 1] - t[k - 2];
    const double h1 = t[k] - t[k - 1];
    w[k - 2] += -h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
    w[k - 1] += h1 * (h1 + 3.0 * h0) / (6.0 * h0);
    w[k] += h1 * (2.0 * h1 + 3.0 * h0) / (6.0 * (h0 + h1));
  }
  return w;
}

} // namespace detail

/**
 * (rho(t), g) - (rho(0), g) - m \int_0^t e^{eta s/2} (rho(s), (eta/2) g' + (x/2) g'') ds
 * for a path exposing times() and pair(k, f, lo, hi). t must be a node of
 * the path's time grid; the time integral is composite Simpson on the nodes.
 */
template <class Path>
double weak_residual(const Path &path, const TestFunction &tf, double t,
                     const WeakFormCoefficients &c) {
  const auto times = path.times();
  if (times.empty()) {
    throw DomainError("weak_residual: empty path");
  }
  const double scale = std::max(1.0, std::abs(times.back()));
  if (t > times.back() + 1e-12 * scale) {
    throw DomainError("weak_residual: t exceeds the path horizon");
  }
  std::size_t k = times.size();
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (std::abs(times[j] - t) <= 1e-12 * scale) {
      k = j;
      break;
    }
  }
  if (k == times.size()) {
    throw DomainError("weak_residual: t must be a node of the path's time grid");
  }
  const double lo = tf.support_lo;
  const double hi = tf.support_hi;
  const double lhs = path.pair(k, tf.g, lo, hi) - path.pair(0, tf.g, lo, hi);
  if (c.m_lambda == 0.0 || k == 0) {
    return lhs;
  }
  auto generator = [&](double x) { return 0.5 * c.eta * tf.dg(x) + 0.5 * x * tf.d2g(x); };
  const auto w = detail::simpson_weights(times, k);
  double rhs = 0.0;
  for (std::size_t j = 0; j <= k; ++j) {
    rhs += w[j] * std::exp(0.5 * c.eta * times[j]) * path.pair(j, generator, lo, hi);
  }
  return lhs - c.m_lambda * rhs;
}

} // namespace vsmhl

#endif // VSMHL_WEAK_FORM_HPP
