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

#ifndef VSMHL_BESSEL_HPP
#define VSMHL_BESSEL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vsmhl/errors.hpp"

namespace vsmhl {

namespace detail {

inline void check_bessel_args(double nu, double z) {
  if (!(nu >= 0.0) || !(z >= 0.0)) {
    throw DomainError("modified_bessel_i: order and argument must be nonnegative");
  }
}

// Arguments above this use the Hankel expansion; below, the power series.
inline double bessel_series_limit(double nu) { return 30.0 + nu * nu; }

// log(e^{-z} I_nu(z)) via the power series summed outward from its largest
// term, so no intermediate value overflows.
inline double log_bessel_i_scaled_series(double nu, double z) {
  const double half = 0.5 * z;
  const double q = half * half;
  const double peak = 0.5 * (-nu + std::sqrt(nu * nu + z * z)) - 1.0;
  const double k0 = std::max(0.0, std::floor(peak));

  const double log_t0 = (2.0 * k0 + nu) * std::log(half) - std::lgamma(k0 + 1.0) -
                        std::lgamma(k0 + nu + 1.0);
  constexpr double eps = std::numeric_limits<double>::epsilon() * 0.25;

  double sum = 1.0;
  double r = 1.0;
  for (double k = k0;; k += 1.0) {
    r *= q / ((k + 1.0) * (k + 1.0 + nu));
    sum += r;
    if (r < eps * sum) {
      break;
    }
  }
  r = 1.0;
  for (double k = k0; k >= 1.0; k -= 1.0) {
    r *= k * (k + nu) / q;
    sum += r;
    if (r < eps * sum) {
      break;
    }
  }
  return log_t0 + std::log(sum) - z;
}

// log(e^{-z} I_nu(z)) from the large-argument expansion
// e^z / sqrt(2 pi z) * sum_k (-1)^k a_k(nu) / z^k, truncated at the
// smallest term.
inline double log_bessel_i_scaled_asymptotic(double nu, double z) {
  const double mu = 4.0 * nu * nu;
  constexpr double eps = std::numeric_limits<double>::epsilon() * 0.25;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (8.0 * k * z);
    if (std::abs(next) >= std::abs(term)) {
      break;
    }
    term = next;
    sum += term;
    if (std::abs(term) < eps * std::abs(sum)) {
      break;
    }
  }
  return std::log(sum) - 0.5 * std::log(2.0 * std::numbers::pi * z);
}

} // namespace detail

/// log(e^{-z} I_nu(z)), finite for every z > 0. Returns -inf at z = 0 when
/// nu > 0.
inline double log_bessel_i_scaled(double nu, double z) {
  detail::check_bessel_args(nu, z);
  if (z == 0.0) {
    return nu == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  if (z <= detail::bessel_series_limit(nu)) {
    return detail::log_bessel_i_scaled_series(nu, z);
  }
  return detail::log_bessel_i_scaled_asymptotic(nu, z);
}

inline double log_bessel_i(double nu, double z) {
  return log_bessel_i_scaled(nu, z) + z;
}

/// Modified Bessel function of the first kind, I_nu(z). Overflows to +inf
/// beyond z ~ 713; use bessel_i_scaled there.
inline double modified_bessel_i(double nu, double z) {
  return std::exp(log_bessel_i(nu, z));
}

/// e^{-z} I_nu(z).
inline double bessel_i_scaled(double nu, double z) {
  return std::exp(log_bessel_i_scaled(nu, z));
}

} // namespace vsmhl

#endif // VSMHL_BESSEL_HPP
