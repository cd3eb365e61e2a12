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

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "experiment.h"

namespace fs = std::filesystem;
using namespace fusionperc;
using namespace fusionperc::cli;
using nlohmann::json;

namespace {

fs::path ScratchDir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fusionperc_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void Write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string ConfigErrorOf(const json& j) {
  try {
    ParseConfig(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

int RunTool(const std::string& args) {
  const std::string cmd = std::string(FUSIONPERC_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("strict schema") {
    CHECK(ConfigErrorOf({{"command", "pi"}, {"seed", 1}, {"bogus", 2}}).find("bogus") !=
          std::string::npos);
    CHECK(ConfigErrorOf({{"command", "pi"}, {"seed", 1}, {"gate", {{"p_sucess", 0.7}}}})
              .find("p_sucess") != std::string::npos);
    CHECK(ConfigErrorOf({{"command", "nope"}, {"seed", 1}}).find("command") != std::string::npos);
    CHECK(ConfigErrorOf({{"command", "pi"}, {"seed", -3}}).find("seed") != std::string::npos);
    CHECK(ConfigErrorOf({{"command", "pi"}, {"seed", 1}, {"n_runs", 0}}).find("n_runs") !=
          std::string::npos);
  }

  TEST_CASE("seed is mandatory") {
    CHECK(ConfigErrorOf({{"command", "pi"}}).find("seed") != std::string::npos);
  }

  TEST_CASE("range errors name the field") {
    CHECK(ConfigErrorOf({{"command", "pi"}, {"seed", 1}, {"gate", {{"p_success", 1.5}}}})
              .find("gate.p_success") != std::string::npos);
    CHECK(ConfigErrorOf({{"command", "loss"}, {"seed", 1}, {"loss", {{"p_loss", -0.1}}}})
              .find("loss.p_loss") != std::string::npos);
  }

  TEST_CASE("defaults resolve and round-trip") {
    for (const std::string& cmd : Commands()) {
      CAPTURE(cmd);
      json j{{"command", cmd}, {"seed", 5}};
      if (cmd == "compare") j["compare"] = {{"external", "theirs.csv"}};
      const ExperimentConfig c = ParseConfig(j);
      const json resolved = ToJson(c);
      CHECK(ToJson(ParseConfig(resolved)) == resolved);
    }
    const ExperimentConfig t = ParseConfig({{"command", "threshold"}, {"seed", 5}});
    CHECK(t.sizes == std::vector<int>{15, 20, 25});
    CHECK(t.p_grid.size() == 13);
    CHECK(t.n_runs == 10000);
    const ExperimentConfig h = ParseConfig({{"command", "heralded"}, {"seed", 5}});
    CHECK(h.loss.mode == LossMode::kHeralded);
    const ExperimentConfig cal = ParseConfig({{"command", "calibrate"}, {"seed", 5}});
    CHECK(cal.model == LatticeModel::kCubicBond);
  }

  TEST_CASE("worker count") {
    CHECK(ResolveWorkers(3) == 3);
    ::setenv("FUSIONPERC_WORKERS", "5", 1);
    CHECK(ResolveWorkers(0) == 5);
    ::unsetenv("FUSIONPERC_WORKERS");
    CHECK(ResolveWorkers(0) >= 1);
  }
}

TEST_SUITE("outputs") {
  TEST_CASE("pi at p = 1 and self-describing files") {
    const fs::path dir = ScratchDir("pi");
    ExperimentConfig c = ParseConfig({{"command", "pi"},
                                      {"seed", 3},
                                      {"n_runs", 50},
                                      {"gate", {{"p_success", 1.0}}},
                                      {"dims", {{"lx", 5}, {"ly", 4}, {"lz", 4}}},
                                      {"output", {{"dir", dir.string()}}}});
    RunExperiment(c, {});
    std::istringstream csv(Slurp(dir / "pi.csv"));
    std::string config_line, header, row;
    std::getline(csv, config_line);
    std::getline(csv, header);
    std::getline(csv, row);
    CHECK(config_line.rfind("# config ", 0) == 0);
    CHECK(header == PiCsvHeader());
    CHECK(header == "p,p_loss,lx,ly,lz,mode,n_runs,n_spanning,pi,ci_lo,ci_hi,seed");
    CHECK(row.find(",50,50,1,") != std::string::npos);

    // validate on either result file reproduces the resolved config.
    const json from_csv = LoadConfigJson((dir / "pi.csv").string());
    const json from_json = LoadConfigJson((dir / "pi.json").string());
    CHECK(ToJson(ParseConfig(from_csv)) == ToJson(c));
    CHECK(ToJson(ParseConfig(from_json)) == ToJson(c));
  }

  TEST_CASE("result CSVs are byte-identical across worker counts") {
    const fs::path dir = ScratchDir("workers");
    const ExperimentConfig c = ParseConfig({{"command", "loss"},
                                            {"seed", 17},
                                            {"n_runs", 300},
                                            {"grids", {{"sizes", {6}}, {"p_loss", {0.0, 0.02, 0.04}}}},
                                            {"output", {{"dir", dir.string()}}}});
    std::string first;
    for (int w : {1, 2, 5}) {
      RunContext ctx;
      ctx.workers = w;
      RunExperiment(c, ctx);
      const std::string csv = Slurp(dir / "loss.csv");
      if (first.empty()) first = csv;
      CHECK(csv == first);
    }
    CHECK_FALSE(first.empty());
  }

  TEST_CASE("resources command") {
    const fs::path dir = ScratchDir("resources");
    RunExperiment(ParseConfig({{"command", "resources"},
                               {"seed", 1},
                               {"resources", {{"n", 1}, {"k", 1}, {"l", 6}}},
                               {"output", {{"dir", dir.string()}}}}),
                  {});
    const std::string csv = Slurp(dir / "resources.csv");
    CHECK(csv.find("\nsites,216\n") != std::string::npos);
    CHECK(csv.find("\nghz,648\n") != std::string::npos);
    CHECK(csv.find("\nfusions,864\n") != std::string::npos);
  }
}

TEST_SUITE("binary") {
  TEST_CASE("exit codes") {
    const fs::path dir = ScratchDir("exit");
    Write(dir / "ok.json", R"({"command":"pi","seed":1,"n_runs":10,"dims":{"lx":3,"ly":3,"lz":3}})");
    Write(dir / "range.json", R"({"command":"pi","seed":1,"gate":{"p_success":1.5}})");
    Write(dir / "noseed.json", R"({"command":"pi"})");
    Write(dir / "broken.json", R"({"command":"pi",)");
    Write(dir / "nofile.json",
          R"({"command":"compare","seed":1,"compare":{"external":"/nonexistent.csv"}})");
    Write(dir / "nofit.json",
          R"({"command":"threshold","seed":1,"n_runs":20,)"
          R"("grids":{"sizes":[4,6],"p":[0.9,0.92,0.94,0.96,0.98]}})");
    const std::string out = " --out " + (dir / "out").string();
    CHECK(RunTool("validate --config " + (dir / "ok.json").string()) == kOk);
    CHECK(RunTool("run --config " + (dir / "ok.json").string() + out) == kOk);
    CHECK(RunTool("validate --config " + (dir / "out" / "pi.csv").string()) == kOk);
    CHECK(RunTool("validate --config " + (dir / "range.json").string()) == kValidation);
    CHECK(RunTool("validate --config " + (dir / "noseed.json").string()) == kValidation);
    CHECK(RunTool("validate --config " + (dir / "broken.json").string()) == kValidation);
    CHECK(RunTool("validate --config " + (dir / "missing.json").string()) == kValidation);
    CHECK(RunTool("run --config " + (dir / "nofile.json").string() + out) == kRuntime);
    CHECK(RunTool("run --config " + (dir / "nofit.json").string() + out) == kFitFailure);
    CHECK(RunTool("frobnicate") == kValidation);
  }
}
