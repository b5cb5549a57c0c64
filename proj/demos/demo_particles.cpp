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


// Simulates the particle system for a few N and prints the Wasserstein-1
// distance between the empirical measure and the limit at t = 1, plus the
// average log growth of the smallest and largest particle.
//
//   demo_particles [seed]

#include <cstdio>
#include <cstdlib>
#include <numeric>

#include "vsmhl/experiments.hpp"
#include "vsmhl/limit_law.hpp"
#include "vsmhl/measures.hpp"
#include "vsmhl/particles.hpp"

int main(int argc, char **argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  const double eta = 2.0;
  const vsmhl::InitialLaw law = vsmhl::PointMass{1.0};
  try {
    const vsmhl::LimitLaw ll(eta, law);
    const auto target = vsmhl::limit_measure(ll, 1.0);
    std::printf("%6s %12s %12s %14s %14s\n", "N", "W1(t=1)", "S(1)/N", "dlog small", "dlog large");
    for (std::size_t n : {16u, 64u, 256u, 1024u}) {
      vsmhl::Rng rng = vsmhl::stream_for(seed, n, 0);
      const auto paths = vsmhl::simulate_system({eta, n, 1.0}, law, 1e-3, rng, {100});
      const auto last = paths.snapshot(paths.nodes() - 1);
      const double w1 = vsmhl::wasserstein1(vsmhl::empirical(last), target);

      // Particles ranked by their value halfway through.
      const auto mid = paths.snapshot(paths.nodes() / 2);
      const auto lo = static_cast<std::size_t>(std::min_element(mid.begin(), mid.end()) - mid.begin());
      const auto hi = static_cast<std::size_t>(std::max_element(mid.begin(), mid.end()) - mid.begin());
      auto avg = [&](std::size_t i) {
        const auto g = vsmhl::log_growth_diagnostic(paths, i, paths.nodes() / 2);
        return std::accumulate(g.increments.begin(), g.increments.end(), 0.0) /
               static_cast<double>(g.increments.size());
      };
      std::printf("%6zu %12.5f %12.5f %14.5f %14.5f\n", n, w1, vsmhl::mean_path(paths).back(),
                  avg(lo), avg(hi));
    }
    std::printf("limit mean e^{eta/2} = %.5f\n", ll.mean(1.0));
  } catch (const std::exception &e) {
    std::fprintf(stderr, "demo_particles: %s\n", e.what());
    return 1;
  }
  return 0;
}
