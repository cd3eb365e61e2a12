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

// Experiment configs and runners behind the command-line tool.

#ifndef FUSIONPERC_TOOLS_EXPERIMENT_H_
#define FUSIONPERC_TOOLS_EXPERIMENT_H_

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fusionperc/percolation.h"
#include "fusionperc/resources.h"

namespace fusionperc::cli {

/// Invalid config: unknown key, bad type, out-of-range value, missing seed.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode { kOk = 0, kValidation = 1, kRuntime = 2, kFitFailure = 3 };

struct ExperimentConfig {
  std::string command;
  std::uint64_t seed = 0;
  std::uint64_t n_runs = 10000;
  LatticeModel model = LatticeModel::kMicrocluster;
  GateParams gate;
  LossSpec loss;
  Dims dims{10, 10, 10};
  ArmAssignment assignment;

  std::vector<double> p_grid;
  std::vector<double> p_loss_grid;
  std::vector<int> sizes;
  std::vector<int> lengths;
  std::vector<int> cross_sections;
  std::vector<int> blocks;
  std::vector<int> k_values;

  ComputationShape shape;
  CountMode count_mode = CountMode::kPaperCompat;
  std::string external;
  int l_cap = 1024;
  int random_instances = 40;

  std::string out_dir = ".";
  std::string format = "csv";

  /// Model parameters shared by every point of the experiment.
  ModelConfig Model() const;
};

const std::vector<std::string>& Commands();

/// Strict parse: unknown keys, wrong types and out-of-range values throw
/// ConfigError naming the field. Grids left out get per-command defaults.
ExperimentConfig ParseConfig(const nlohmann::json& j);

/// Accepts a config file, or a result file written by this tool (JSON with
/// a "config" member, or CSV whose first line is "# config {...}").
nlohmann::json LoadConfigJson(const std::string& path);

/// Fully resolved config; ParseConfig(ToJson(c)) reproduces c.
nlohmann::json ToJson(const ExperimentConfig& c);

struct RunContext {
  int workers = 1;
  std::ostream* log = nullptr;     // progress, may be null
  std::ostream* report = nullptr;  // short human summary, may be null
};

/// Runs the configured command and writes its artifacts into out_dir.
/// Throws ConfigError, FitError or std::runtime_error.
void RunExperiment(const ExperimentConfig& c, const RunContext& ctx);

/// One CSV row per Pi estimate.
std::string PiCsvHeader();
std::string PiCsvRow(const ModelConfig& m, const RunStats& s);

/// Worker count: explicit value if > 0, else FUSIONPERC_WORKERS, else the
/// hardware concurrency.
int ResolveWorkers(int flag);

}  // namespace fusionperc::cli

#endif  // FUSIONPERC_TOOLS_EXPERIMENT_H_
