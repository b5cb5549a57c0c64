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

#ifndef VSMHL_DETAIL_QUADRATURE_HPP
#define VSMHL_DETAIL_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace vsmhl::detail {

inline constexpr double kQuadTol = 1e-12;

struct QuadPiece {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;

  bool operator<(const QuadPiece &o) const noexcept { return error < o.error; }
};

// One 10-point Gauss / 21-point Kronrod pair on [a, b]. Node and weight
// tables come from Boost.Math; the Gauss nodes are the odd Kronrod nodes.
template <class F> QuadPiece gauss_kronrod21(F &f, double a, double b) {
  using kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
  using gauss = boost::math::quadrature::gauss<double, 10>;
  const auto &xk = kronrod::abscissa();
  const auto &wk = kronrod::weights();
  const auto &wg = gauss::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double f0 = f(mid);
  double k_sum = f0 * wk[0];
  double g_sum = 0.0;
  double l1 = std::abs(k_sum);
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double fp = f(mid + half * xk[i]);
    const double fm = f(mid - half * xk[i]);
    k_sum += (fp + fm) * wk[i];
    l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
    if (i % 2 == 1) {
      g_sum += (fp + fm) * wg[i / 2];
    }
  }
  const double value = half * k_sum;
  const double floor = 50.0 * std::numeric_limits<double>::epsilon() * half * l1;
  return {a, b, value, std::max(half * std::abs(k_sum - g_sum), floor)};
}

// Globally adaptive Gauss-Kronrod on [a, b]: the piece with the largest
// error estimate is bisected until the summed estimate meets
// max(abs_tol, rel_tol * |integral|) or the piece budget runs out.
template <class F>
double integrate(F &&f, double a, double b, double rel_tol = kQuadTol,
                 double abs_tol = 0.0, std::size_t max_pieces = 2000) {
  if (!(b > a)) {
    return 0.0;
  }
  std::priority_queue<QuadPiece> heap;
  QuadPiece first = gauss_kronrod21(f, a, b);
  double total = first.value;
  double err = first.error;
  heap.push(first);
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) && heap.size() < max_pieces) {
    const QuadPiece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      break;
    }
    heap.pop();
    const QuadPiece left = gauss_kronrod21(f, worst.a, mid);
    const QuadPiece right = gauss_kronrod21(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  double sum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    heap.pop();
  }
  return sum;
}

// Adaptive integral over [a, b] split at the interior breakpoints.
template <class F>
double integrate_pieces(F &&f, double a, double b, std::vector<double> cuts,
                        double tol = kQuadTol) {
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  double prev = a;
  for (double c : cuts) {
    c = std::clamp(c, a, b);
    if (c > prev) {
      total += integrate(f, prev, c, tol);
      prev = c;
    }
  }
  return total;
}

// Fixed 10-point Gauss-Legendre on [a, b].
template <class F> double gauss10(F &&f, double a, double b) {
  return boost::math::quadrature::gauss<double, 10>::integrate(f, a, b);
}

} // namespace vsmhl::detail

#endif // VSMHL_DETAIL_QUADRATURE_HPP
