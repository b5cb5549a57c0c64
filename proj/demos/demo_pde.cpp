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


// Solves the limiting Fokker-Planck equation from a smoothed point mass and
// compares it with the analytic density; writes the trajectory to pde.csv.
//
//   demo_pde [nx] [nt] [output.csv]

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "vsmhl/pde.hpp"
#include "vsmhl/weak_form.hpp"

int main(int argc, char **argv) {
  const vsmhl::SolverGrid grid{30.0, argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 1200,
                               argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 800};
  const std::string out = argc > 3 ? argv[3] : "pde.csv";
  const vsmhl::ModelParams params{2.0, 1, 1.0};
  const vsmhl::InitialLaw law = vsmhl::PointMass{1.0};
  try {
    const auto traj = vsmhl::solve(params, law, grid);
    const vsmhl::LimitLaw ll(params.eta, law);
    std::printf("grid nx = %zu, nt = %zu, advisory CFL ratio %.1f\n", grid.nx, grid.nt,
                traj.cfl_ratio);
    std::printf("%6s %12s %12s %12s\n", "t", "L1", "mass", "mean");
    for (std::size_t n = grid.nt / 4; n <= grid.nt; n += grid.nt / 4) {
      std::printf("%6.3f %12.3e %12.9f %12.6f\n", traj.time(n), vsmhl::l1_error(traj, n, ll),
                  traj.mass(n), traj.mean(n));
    }
    for (const auto &tf : vsmhl::test_function_bank()) {
      std::printf("weak residual %-28s %+.3e\n", tf.name.c_str(),
                  vsmhl::weak_residual(traj, tf, 1.0, {params.eta, ll.m_lambda()}));
    }
    std::ofstream os(out);
    vsmhl::write_trajectory_csv(os, traj, grid.nt / 4);
    std::printf("trajectory written to %s\n", out.c_str());
  } catch (const std::exception &e) {
    std::fprintf(stderr, "demo_pde: %s\n", e.what());
    return 1;
  }
  return 0;
}
