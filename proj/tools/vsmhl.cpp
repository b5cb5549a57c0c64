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


// vsmhl run --config <path> [--output-dir <path>] [--seed <u64>] [--threads <n>] [--assert]
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid configuration,
// 3 experiment checks failed under --assert.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vsmhl/config.hpp"
#include "vsmhl/errors.hpp"
#include "vsmhl/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAssert = 3;

int run(const std::string &config_path, const std::optional<std::string> &output_dir,
        const std::optional<std::uint64_t> &seed, const std::optional<std::size_t> &threads,
        bool assert_checks) {
  vsmhl::ExperimentConfig cfg;
  try {
    cfg = vsmhl::load_config(config_path);
    if (output_dir) {
      cfg.output_dir = *output_dir;
    }
    if (seed) {
      cfg.seed = *seed;
    }
    if (threads) {
      if (*threads == 0) {
        throw vsmhl::ValidationError({"threads must be at least 1"});
      }
      cfg.threads = *threads;
    }
  } catch (const vsmhl::ValidationError &e) {
    std::cerr << "vsmhl: invalid configuration\n";
    for (const auto &v : e.violations()) {
      std::cerr << "  - " << v << '\n';
    }
    return kExitConfig;
  }

  vsmhl::ExperimentResult result;
  try {
    result = vsmhl::run_experiment(cfg);
  } catch (const vsmhl::ValidationError &e) {
    std::cerr << "vsmhl: invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const vsmhl::ConfigError &e) {
    std::cerr << "vsmhl: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const vsmhl::StepSizeError &e) {
    std::cerr << "vsmhl: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception &e) {
    std::cerr << "vsmhl: run failed: " << e.what() << '\n';
    try {
      vsmhl::write_failure_manifest(cfg.output_dir, cfg, e.what());
    } catch (const std::exception &inner) {
      std::cerr << "vsmhl: could not write failure manifest: " << inner.what() << '\n';
    }
    return kExitRuntime;
  }

  try {
    vsmhl::write_result(cfg.output_dir, result, cfg);
  } catch (const std::exception &e) {
    std::cerr << "vsmhl: cannot write outputs: " << e.what() << '\n';
    return kExitRuntime;
  }

  std::cout << vsmhl::to_string(cfg.experiment) << ": "
            << (result.passed ? "checks passed" : "checks FAILED") << " (outputs in "
            << cfg.output_dir << ")\n";
  for (const auto &f : result.failures) {
    std::cout << "  - " << f << '\n';
  }
  if (assert_checks && !result.passed) {
    return kExitAssert;
  }
  return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"volatility-stabilized market particle system: simulation and verification"};
  app.set_version_flag("--version", std::string(vsmhl::kLibraryVersion));
  app.require_subcommand(1);

  auto *cmd = app.add_subcommand("run", "run one experiment described by a JSON config");
  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  bool assert_checks = false;
  cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
  cmd->add_option("--output-dir", output_dir, "override output_dir from the config");
  cmd->add_option("--seed", seed, "override the seed from the config");
  cmd->add_option("--threads", threads, "worker threads for replications");
  cmd->add_flag("--assert", assert_checks, "exit with code 3 if the experiment's checks fail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  return run(config_path, output_dir, seed, threads, assert_checks);
}
