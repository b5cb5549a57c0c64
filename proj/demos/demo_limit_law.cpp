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


// Prints summary statistics of the limit law rho(t) for a gamma initial law
// and writes its density to limit_density.csv.
//
//   demo_limit_law [eta] [output.csv]

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "vsmhl/limit_law.hpp"
#include "vsmhl/measures.hpp"

int main(int argc, char **argv) {
  const double eta = argc > 1 ? std::atof(argv[1]) : 2.0;
  const std::string out = argc > 2 ? argv[2] : "limit_density.csv";
  try {
    const vsmhl::LimitLaw ll(eta, vsmhl::GammaLaw{2.0, 0.5});
    std::printf("eta = %g, lambda = Gamma(2, 0.5), m = %g\n", eta, ll.m_lambda());
    std::printf("%6s %12s %12s %12s %12s %12s\n", "t", "J(t)", "mean", "median", "q90",
                "P(Y<0.1)");
    for (double t : {0.1, 0.25, 0.5, 1.0}) {
      const auto table = ll.cdf_table(t);
      std::printf("%6.2f %12.6f %12.6f %12.6f %12.6f %12.3e\n", t, ll.time_change(t),
                  ll.mean(t), table.quantile(0.5), table.quantile(0.9), table(0.1));
    }
    std::vector<double> ys;
    for (int k = 0; k <= 400; ++k) {
      ys.push_back(0.025 * k);
    }
    std::ofstream os(out);
    vsmhl::write_density_csv(os, ll, 1.0, ys);
    std::printf("density of rho(1) written to %s\n", out.c_str());
  } catch (const std::exception &e) {
    std::fprintf(stderr, "demo_limit_law: %s\n", e.what());
    return 1;
  }
  return 0;
}
