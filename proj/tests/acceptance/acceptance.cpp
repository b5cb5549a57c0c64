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


// Acceptance suite: ten property checks with fixed tolerances and runtime
// budgets. Prints one PASS/FAIL line per criterion; exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vsmhl/experiments.hpp"
#include "vsmhl/limit_law.hpp"
#include "vsmhl/measures.hpp"
#include "vsmhl/particles.hpp"
#include "vsmhl/pde.hpp"
#include "vsmhl/weak_form.hpp"

using namespace vsmhl;

namespace {

constexpr std::uint64_t kSeed = 20260417;

struct Verdict {
  bool ok = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Verdict()> body;
};

std::string fmt(const char *f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const std::vector<double> kEtas = {1.5, 2.0, 3.0};
const std::vector<InitialLaw> kLaws = {PointMass{1.0}, GammaLaw{2.0, 0.5}};
const std::vector<double> kTimes = {0.5, 1.0};

Verdict mean_identity() {
  double worst = 0.0;
  for (double eta : kEtas) {
    for (const auto &law : kLaws) {
      const LimitLaw ll(eta, law);
      for (double t : kTimes) {
        const double m = ll.pair(t, [](double y) { return y; });
        const double expect = moments(law).m1 * std::exp(0.5 * eta * t);
        worst = std::max(worst, std::abs(m - expect) / expect);
      }
    }
  }
  return {worst <= 1e-6, "max relative error " + fmt("%.3g", worst) + " (bound 1e-6)"};
}

Verdict normalization() {
  double worst = 0.0;
  for (double eta : kEtas) {
    for (const auto &law : kLaws) {
      const LimitLaw ll(eta, law);
      for (double t : kTimes) {
        worst = std::max(worst, std::abs(ll.pair(t, [](double) { return 1.0; }) - 1.0));
      }
    }
  }
  return {worst <= 1e-8, "max |mass - 1| " + fmt("%.3g", worst) + " (bound 1e-8)"};
}

Verdict sampler_agreement() {
  bool ok = true;
  double worst_ratio = 0.0;
  std::uint64_t cell = 0;
  for (double eta : kEtas) {
    for (const auto &law : kLaws) {
      ExperimentConfig cfg;
      cfg.experiment = ExperimentKind::sampler_check;
      cfg.params = {eta, 1, 1.0};
      cfg.law = law;
      cfg.times = kTimes;
      cfg.samples = 100000;
      cfg.seed = kSeed + cell++;
      const auto res = run_sampler_check(cfg);
      ok = ok && res.passed;
      const double crit = res.summary["critical"].get<double>();
      for (double ks : res.summary["ks"].get<std::vector<double>>()) {
        worst_ratio = std::max(worst_ratio, ks / crit);
      }
    }
  }
  return {ok, "max KS / critical " + fmt("%.3f", worst_ratio) + " over 12 cells (n = 1e5)"};
}

const ModelParams kPdeParams{2.0, 1, 1.0};
const SolverGrid kPdeGrid{30.0, 1200, 800};

Verdict pde_vs_analytic() {
  const LimitLaw ll(2.0, PointMass{1.0});
  const auto fine = solve(kPdeParams, PointMass{1.0}, kPdeGrid);
  const SolverGrid half{30.0, 600, 400};
  const auto coarse = solve(kPdeParams, PointMass{1.0}, half);
  const double l1 = l1_error(fine, kPdeGrid.nt, ll);
  const double l1c = l1_error(coarse, half.nt, ll);
  const double drift = fine.mass_drift();
  const double ratio = l1c / l1;
  const bool ok = l1 <= 1e-2 && drift <= 1e-6 && ratio >= 1.5;
  return {ok, "L1 " + fmt("%.3g", l1) + " (<= 1e-2), mass drift " + fmt("%.2g", drift) +
                  " (<= 1e-6), halving ratio " + fmt("%.2f", ratio) + " (>= 1.5)"};
}

Verdict weak_form() {
  const LimitLaw ll(2.0, PointMass{1.0});
  std::vector<double> times(401);
  for (std::size_t k = 0; k < times.size(); ++k) {
    times[k] = static_cast<double>(k) / 400.0;
  }
  const auto apath = limit_measure_path(ll, times);
  const auto traj = solve(kPdeParams, PointMass{1.0}, kPdeGrid);
  const WeakFormCoefficients c{2.0, ll.m_lambda()};
  double worst_a = 0.0;
  double worst_p = 0.0;
  for (const auto &tf : test_function_bank()) {
    for (double t : kTimes) {
      worst_a = std::max(worst_a, std::abs(weak_residual(apath, tf, t, c)));
      worst_p = std::max(worst_p, std::abs(weak_residual(traj, tf, t, c)));
    }
  }
  return {worst_a <= 1e-4 && worst_p <= 5e-3,
          "analytic max |r| " + fmt("%.3g", worst_a) + " (<= 1e-4), PDE max |r| " +
              fmt("%.3g", worst_p) + " (<= 5e-3)"};
}

ExperimentConfig convergence_config(std::size_t threads) {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::convergence;
  cfg.params = {2.0, 64, 1.0};
  cfg.law = PointMass{1.0};
  cfg.dt = 1e-3;
  cfg.n_values = {64, 256, 1024};
  cfg.replications = 20;
  cfg.snapshots = 21;
  cfg.seed = kSeed;
  cfg.threads = threads;
  return cfg;
}

ExperimentResult g_convergence;

Verdict particle_convergence() {
  g_convergence = run_convergence(convergence_config(1));
  const auto med = g_convergence.summary["medians"].get<std::vector<double>>();
  bool decreasing = true;
  for (std::size_t k = 1; k < med.size(); ++k) {
    decreasing = decreasing && med[k] < med[k - 1];
  }
  const double ratio = med.back() / med.front();
  return {decreasing && ratio < 0.6,
          "median sup-W1 " + fmt("%.4g", med[0]) + " / " + fmt("%.4g", med[1]) + " / " +
              fmt("%.4g", med[2]) + " for N = 64/256/1024, last/first " + fmt("%.3f", ratio) +
              " (< 0.6)"};
}

Verdict moment_identities() {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::moment_check;
  cfg.params = {2.0, 256, 1.0};
  cfg.law = PointMass{1.0};
  cfg.dt = 1e-3;
  cfg.replications = 200;
  cfg.times = {1.0};
  cfg.seed = kSeed;
  const auto res = run_moment_check(cfg);
  double z1 = 0.0;
  double z2 = 0.0;
  for (const auto &z : res.summary["z_scores"]) {
    (z["moment"].get<int>() == 1 ? z1 : z2) = z["z"].get<double>();
  }
  return {std::abs(z1) <= 3.0 && std::abs(z2) <= 4.0,
          "z(E[S(1)]) = " + fmt("%.3f", z1) + " (|z| <= 3), z(E[S(1)^2]) = " + fmt("%.3f", z2) +
              " (|z| <= 4)"};
}

// N = 1: Euler on dY = (eta/2) Y dt + Y dB versus exp((eta - 1) t / 2 + B_t),
// all step sizes driven by one Brownian path per replication.
Verdict gbm_strong_error() {
  const double eta = 2.0;
  const int coarsest = 6;
  const int finest = 10;
  const std::size_t fine_steps = std::size_t{1} << finest;
  const std::size_t reps = 10000;
  const Rng root(kSeed);
  std::vector<double> err(finest - coarsest + 1, 0.0);
  std::vector<double> db(fine_steps);
  std::normal_distribution<double> z;
  for (std::size_t r = 0; r < reps; ++r) {
    Rng rng = root.split(r);
    const double sd = std::sqrt(1.0 / static_cast<double>(fine_steps));
    double b = 0.0;
    for (double &v : db) {
      v = sd * z(rng);
      b += v;
    }
    const double exact = std::exp(0.5 * (eta - 1.0) + b);
    for (int level = coarsest; level <= finest; ++level) {
      const std::size_t steps = std::size_t{1} << level;
      const std::size_t group = fine_steps / steps;
      auto noise = [&](std::size_t k, std::span<double> out) {
        double s = 0.0;
        for (std::size_t q = 0; q < group; ++q) {
          s += db[k * group + q];
        }
        out[0] = s;
      };
      const auto p = simulate_with_noise({eta, 1, 1.0}, {1.0}, 1.0 / static_cast<double>(steps),
                                         noise, {steps});
      err[level - coarsest] += std::abs(p.totals.back() - exact) / static_cast<double>(reps);
    }
  }
  bool ok = true;
  std::string ratios;
  for (std::size_t k = 0; k + 1 < err.size(); ++k) {
    const double q = err[k] / err[k + 1];
    ok = ok && q >= 1.2 && q <= 3.0;
    ratios += (k ? ", " : "") + fmt("%.3f", q);
  }
  return {ok, "error ratios under halving [" + ratios + "] (each in [1.2, 3])"};
}

Measure1D random_atoms(std::mt19937_64 &gen) {
  std::uniform_int_distribution<int> count(1, 6);
  std::uniform_real_distribution<double> loc(0.0, 4.0);
  std::uniform_real_distribution<double> wt(0.01, 1.0);
  const int k = count(gen);
  std::vector<double> x(k);
  std::vector<double> w(k);
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    x[i] = loc(gen);
    w[i] = wt(gen);
    total += w[i];
  }
  for (double &v : w) {
    v /= total;
  }
  return Measure1D::atoms(x, w);
}

Verdict metric_sanity() {
  std::mt19937_64 gen(kSeed);
  std::size_t violations = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto a = random_atoms(gen);
    const auto b = random_atoms(gen);
    const auto c = random_atoms(gen);
    for (Metric m : {Metric::wasserstein1, Metric::levy}) {
      const double ab = distance(a, b, m);
      const double ba = distance(b, a, m);
      const double bc = distance(b, c, m);
      const double ac = distance(a, c, m);
      const double aa = distance(a, a, m);
      const bool ok = ab >= 0.0 && std::abs(ab - ba) <= 1e-9 && aa <= 1e-12 &&
                      ac <= ab + bc + 1e-9 && (ab > 0.0 || wasserstein1(a, b) <= 1e-12) &&
                      (m != Metric::levy || ab <= 1.0);
      violations += ok ? 0 : 1;
    }
  }
  const double l = levy(Measure1D::atoms({0.0}, {1.0}), Measure1D::atoms({0.5}, {1.0}));
  return {violations == 0 && std::abs(l - 0.5) <= 1e-3,
          std::to_string(violations) + " axiom violations over 1000 triples x 2 metrics; " +
              "levy(delta_0, delta_1/2) = " + fmt("%.6f", l)};
}

Verdict determinism() {
  namespace fs = std::filesystem;
  const auto root = fs::temp_directory_path() / "vsmhl_acceptance_determinism";
  fs::remove_all(root);
  const auto serial = convergence_config(1);
  const auto pooled = convergence_config(4);
  const auto again = run_convergence(pooled);
  write_result(root / "serial", g_convergence, serial);
  write_result(root / "pooled", again, pooled);
  auto slurp = [](const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  bool ok = !g_convergence.tables.empty();
  std::size_t files = 0;
  for (const auto &t : g_convergence.tables) {
    const auto name = t.name + ".csv";
    ok = ok && slurp(root / "serial" / name) == slurp(root / "pooled" / name) &&
         !slurp(root / "serial" / name).empty();
    ++files;
  }
  fs::remove_all(root);
  return {ok, std::to_string(files) + " CSV files compared, 1 worker vs 4 workers, " +
                  (ok ? "byte-identical" : "DIFFER")};
}

} // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "mean identity", 10, mean_identity},
      {2, "normalization", 10, normalization},
      {3, "sampler/density agreement", 30, sampler_agreement},
      {4, "PDE vs analytic density", 120, pde_vs_analytic},
      {5, "weak-form residual", 60, weak_form},
      {6, "particle convergence", 600, particle_convergence},
      {7, "moment identities", 300, moment_identities},
      {8, "N=1 GBM strong error", 120, gbm_strong_error},
      {9, "metric sanity", 10, metric_sanity},
      // Bounded by criterion 6: the second run must fit in its budget too.
      {10, "determinism", 600, determinism},
  };
  int failed = 0;
  for (const auto &c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.body();
    } catch (const std::exception &e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = secs <= c.budget_s;
    const bool ok = v.ok && in_budget;
    failed += ok ? 0 : 1;
    std::printf("[%s] %2d %-26s %s; %.1f s (budget %.0f s%s)\n", ok ? "PASS" : "FAIL", c.id,
                c.name.c_str(), v.detail.c_str(), secs, c.budget_s,
                in_budget ? "" : ", EXCEEDED");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
