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


#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vsmhl/experiments.hpp"

using namespace vsmhl;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_convergence() {
  ExperimentConfig c;
  c.experiment = ExperimentKind::convergence;
  c.params = {2.0, 8, 1.0};
  c.dt = 0.01;
  c.n_values = {8, 32};
  c.replications = 4;
  c.snapshots = 11;
  c.seed = 42;
  return c;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string &name) {
  const auto d = fs::temp_directory_path() / ("vsmhl_exp_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

} // namespace

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (std::size_t threads : {1u, 2u, 5u}) {
    std::vector<std::atomic<int>> hits(37);
    parallel_for(hits.size(), threads, [&](std::size_t k) { hits[k]++; });
    for (auto &h : hits) {
      EXPECT_EQ(h.load(), 1);
    }
  }
}

TEST(ParallelFor, PropagatesExceptions) {
  for (std::size_t threads : {1u, 3u}) {
    EXPECT_THROW(parallel_for(20, threads,
                              [](std::size_t k) {
                                if (k == 7) {
                                  throw DomainError("boom");
                                }
                              }),
                 DomainError);
  }
}

TEST(Streams, IndependentOfOtherStreams) {
  Rng a = stream_for(1, 64, 3);
  Rng b = stream_for(1, 64, 3);
  Rng c = stream_for(1, 64, 4);
  Rng d = stream_for(1, 256, 3);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
}

TEST(Median, OddEvenAndEmpty) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_THROW(median({}), DomainError);
}

TEST(Convergence, ByteIdenticalAcrossRunsAndThreadCounts) {
  auto c1 = small_convergence();
  auto c3 = small_convergence();
  c3.threads = 3;
  const auto r1 = run_convergence(c1);
  const auto r1b = run_convergence(c1);
  const auto r3 = run_convergence(c3);
  ASSERT_EQ(r1.tables.size(), 2u);
  for (std::size_t k = 0; k < r1.tables.size(); ++k) {
    EXPECT_EQ(to_csv(r1.tables[k]), to_csv(r1b.tables[k]));
    EXPECT_EQ(to_csv(r1.tables[k]), to_csv(r3.tables[k]));
  }
  auto other = small_convergence();
  other.seed = 43;
  EXPECT_NE(to_csv(run_convergence(other).tables[0]), to_csv(r1.tables[0]));
}

TEST(Convergence, AddingReplicationsKeepsExistingRows) {
  auto small = small_convergence();
  auto big = small_convergence();
  big.replications = 6;
  const auto rs = run_convergence(small).tables[0];
  const auto rb = run_convergence(big).tables[0];
  ASSERT_EQ(rs.rows.size(), 8u);
  ASSERT_EQ(rb.rows.size(), 12u);
  for (std::size_t g = 0; g < 2; ++g) {
    for (std::size_t r = 0; r < 4; ++r) {
      EXPECT_EQ(rs.rows[g * 4 + r], rb.rows[g * 6 + r]);
    }
  }
}

TEST(Convergence, TableShapeAndValues) {
  const auto res = run_convergence(small_convergence());
  const auto &t = res.tables[0];
  EXPECT_EQ(t.name, "convergence");
  EXPECT_EQ(t.columns, (std::vector<std::string>{"N", "replication", "metric", "value"}));
  for (const auto &row : t.rows) {
    EXPECT_EQ(std::get<std::string>(row[2]), "wasserstein1");
    EXPECT_GT(std::get<double>(row[3]), 0.0);
  }
  EXPECT_EQ(res.summary["snapshot_times"].size(), 11u);
}

TEST(Convergence, SnapshotsMustDivideSteps) {
  auto c = small_convergence();
  c.snapshots = 8;
  EXPECT_THROW(run_convergence(c), ConfigError);
}

TEST(Experiments, TagMismatchIsConfigError) {
  const auto c = small_convergence();
  EXPECT_THROW(run_pde_check(c), ConfigError);
  EXPECT_THROW(run_sampler_check(c), ConfigError);
  EXPECT_THROW(run_moment_check(c), ConfigError);
  EXPECT_THROW(run_rank_check(c), ConfigError);
  auto p = c;
  p.experiment = ExperimentKind::pde_check;
  EXPECT_THROW(run_convergence(p), ConfigError);
}

TEST(Experiments, SamplerCheckSmall) {
  ExperimentConfig c;
  c.experiment = ExperimentKind::sampler_check;
  c.params = {1.5, 1, 1.0};
  c.law = GammaLaw{2.0, 0.5};
  c.times = {0.5, 1.0};
  c.samples = 4000;
  const auto res = run_experiment(c);
  ASSERT_EQ(res.tables.size(), 1u);
  EXPECT_EQ(res.tables[0].rows.size(), 2u);
  EXPECT_TRUE(res.passed) << res.summary.dump();
}

TEST(Experiments, MomentCheckSmall) {
  ExperimentConfig c;
  c.experiment = ExperimentKind::moment_check;
  c.params = {2.0, 16, 1.0};
  c.dt = 0.01;
  c.replications = 200;
  c.times = {0.5, 1.0};
  c.threads = 2;
  const auto res = run_experiment(c);
  EXPECT_EQ(res.tables[0].rows.size(), 4u);
  EXPECT_TRUE(res.passed) << res.summary.dump();
  c.times = {0.505};
  EXPECT_THROW(run_experiment(c), ConfigError);
}

TEST(Experiments, RankCheckSmall) {
  ExperimentConfig c;
  c.experiment = ExperimentKind::rank_check;
  c.params = {2.0, 16, 1.0};
  c.dt = 0.01;
  c.n_values = {16, 256};
  c.replications = 6;
  const auto res = run_experiment(c);
  EXPECT_EQ(res.tables[0].rows.size(), 12u);
  EXPECT_EQ(res.tables[1].rows.size(), 2u);
  EXPECT_TRUE(res.passed) << res.summary.dump();
}

TEST(Experiments, PdeCheckCoarseGridFailsItsChecks) {
  ExperimentConfig c;
  c.experiment = ExperimentKind::pde_check;
  c.grid = {30.0, 32, 32};
  c.analytic_time_nodes = 33;
  const auto res = run_experiment(c);
  EXPECT_FALSE(res.passed);
  EXPECT_FALSE(res.failures.empty());
  c.grid = {30.0, 30, 32};
  EXPECT_THROW(run_experiment(c), ConfigError);
  c.grid = {5.0, 200, 100};
  EXPECT_THROW(run_experiment(c), ConfigError);
}

TEST(Output, WriteResultProducesCsvAndSidecars) {
  const auto dir = scratch("write");
  const auto cfg = small_convergence();
  const auto res = run_convergence(cfg);
  write_result(dir, res, cfg);
  for (const char *name : {"convergence", "convergence_medians"}) {
    ASSERT_TRUE(fs::exists(dir / (std::string(name) + ".csv"))) << name;
    const auto side = nlohmann::json::parse(slurp(dir / (std::string(name) + ".json")));
    EXPECT_EQ(side["schema_version"], kSidecarSchemaVersion);
    EXPECT_EQ(side["library_version"], kLibraryVersion);
    EXPECT_EQ(side["seed"], 42u);
    EXPECT_EQ(side["table"], name);
    EXPECT_EQ(side["config"], config_to_json(cfg));
  }
  const auto csv = slurp(dir / "convergence.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "N,replication,metric,value");
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(summary["experiment"], "convergence");
  EXPECT_EQ(summary["passed"], res.passed);
  fs::remove_all(dir);
}

TEST(Output, FailureManifest) {
  const auto dir = scratch("fail");
  write_failure_manifest(dir, small_convergence(), "something broke");
  const auto j = nlohmann::json::parse(slurp(dir / "failure.json"));
  EXPECT_EQ(j["status"], "failed");
  EXPECT_EQ(j["error"], "something broke");
  EXPECT_EQ(j["seed"], 42u);
  fs::remove_all(dir);
}

TEST(Output, CellFormattingRoundTrips) {
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_cell(Cell{x})), x);
  EXPECT_EQ(format_cell(Cell{std::int64_t{-7}}), "-7");
  EXPECT_EQ(format_cell(Cell{std::string("levy")}), "levy");
}
