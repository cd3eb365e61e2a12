// Copyright 2026 The fusionperc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// fusionperc: runs one experiment described by a JSON config.
//
//   fusionperc run --config exp.json [--workers N] [--out DIR] [--format csv|json]
//   fusionperc validate --config exp.json

#include <iostream>

#include <CLI11.hpp>

#include "experiment.h"

namespace cli = fusionperc::cli;

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo percolation of ballistically fused 3-GHZ cluster states"};
  app.require_subcommand(1, 1);

  std::string config_path;
  int workers = 0;
  std::string out_dir;
  std::string format;

  CLI::App* run = app.add_subcommand("run", "Run the experiment named by the config");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--workers", workers,
                  "Worker threads (default: $FUSIONPERC_WORKERS, else all cores)")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--out", out_dir, "Output directory (overrides output.dir)");
  run->add_option("--format", format, "Result format (overrides output.format)")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI::App* validate = app.add_subcommand("validate", "Check a config and print it resolved");
  validate->add_option("--config", config_path, "Config, or a result file of this tool")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kValidation;
  }

  cli::ExperimentConfig config;
  try {
    nlohmann::json j = cli::LoadConfigJson(config_path);
    if (j.is_object()) {
      if (!out_dir.empty()) j["output"]["dir"] = out_dir;
      if (!format.empty()) j["output"]["format"] = format;
    }
    config = cli::ParseConfig(j);
  } catch (const cli::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return cli::kValidation;
  }

  if (validate->parsed()) {
    std::cout << cli::ToJson(config).dump(2) << '\n';
    return cli::kOk;
  }

  cli::RunContext ctx;
  ctx.workers = cli::ResolveWorkers(workers);
  ctx.log = &std::cerr;
  ctx.report = &std::cout;
  try {
    cli::RunExperiment(config, ctx);
  } catch (const cli::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return cli::kValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return cli::kValidation;
  } catch (const fusionperc::FitError& e) {
    std::cerr << "fit failed: " << e.what() << '\n';
    return cli::kFitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kRuntime;
  }
  return cli::kOk;
}
