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

#include "experiment.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "fusionperc/oracle_check.h"

namespace fusionperc::cli {

using nlohmann::json;

namespace {

std::string Join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void CheckKeys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) {
    throw ConfigError((path.empty() ? "config" : path) + ": expected an object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(Join(path, key) + ": unknown key");
  }
}

double GetDouble(const json& obj, const std::string& path, const std::string& key, double def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(Join(path, key) + ": expected a number");
  return v.get<double>();
}

std::int64_t GetInt(const json& obj, const std::string& path, const std::string& key,
                    std::int64_t def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(Join(path, key) + ": expected an integer");
  return v.get<std::int64_t>();
}

std::string GetString(const json& obj, const std::string& path, const std::string& key,
                      const std::string& def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(Join(path, key) + ": expected a string");
  return v.get<std::string>();
}

void RequireProbability(double p, const std::string& field, bool allow_one = true) {
  if (!(p >= 0.0 && (allow_one ? p <= 1.0 : p < 1.0))) {
    std::ostringstream os;
    os << field << ": must be in [0, 1" << (allow_one ? "]" : ")") << ", got " << p;
    throw ConfigError(os.str());
  }
}

void RequireAtLeast(std::int64_t v, std::int64_t lo, const std::string& field) {
  if (v < lo) {
    throw ConfigError(field + ": must be >= " + std::to_string(lo) + ", got " +
                      std::to_string(v));
  }
}

std::vector<double> GetDoubleList(const json& obj, const std::string& path, const std::string& key,
                                  bool probabilities) {
  std::vector<double> out;
  if (!obj.contains(key)) return out;
  const json& v = obj.at(key);
  const std::string field = Join(path, key);
  if (!v.is_array() || v.empty()) throw ConfigError(field + ": expected a non-empty list");
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string item = field + "[" + std::to_string(i) + "]";
    if (!v[i].is_number()) throw ConfigError(item + ": expected a number");
    const double x = v[i].get<double>();
    if (probabilities) RequireProbability(x, item);
    out.push_back(x);
  }
  return out;
}

std::vector<int> GetIntList(const json& obj, const std::string& path, const std::string& key,
                            int min_value) {
  std::vector<int> out;
  if (!obj.contains(key)) return out;
  const json& v = obj.at(key);
  const std::string field = Join(path, key);
  if (!v.is_array() || v.empty()) throw ConfigError(field + ": expected a non-empty list");
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string item = field + "[" + std::to_string(i) + "]";
    if (!v[i].is_number_integer()) throw ConfigError(item + ": expected an integer");
    const std::int64_t x = v[i].get<std::int64_t>();
    RequireAtLeast(x, min_value, item);
    if (x > 1'000'000) throw ConfigError(item + ": too large");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

std::vector<double> Grid(double lo, double hi, double step) {
  std::vector<double> out;
  const int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) out.push_back(std::round((lo + i * step) * 1e9) / 1e9);
  return out;
}

std::string_view SchemeName(GateScheme s) {
  return s == GateScheme::kBellAncilla ? "bell_ancilla" : "four_singles";
}

std::string BasisName(const FusionBasis& b) {
  return {PauliChar(b.first), PauliChar(b.second)};
}

ArmAssignment ParseAssignment(const json& obj, const std::string& path) {
  CheckKeys(obj, path, {"side1", "side2"});
  ArmAssignment a;
  for (const char* side : {"side1", "side2"}) {
    const std::string field = Join(path, side);
    if (!obj.contains(side)) throw ConfigError(field + ": required");
    const json& v = obj.at(side);
    if (!v.is_array() || v.size() != 2) throw ConfigError(field + ": expected two slot names");
    std::array<ArmSlot, 2> slots{};
    for (int i = 0; i < 2; ++i) {
      const auto s = v[i].is_string() ? ParseSlot(v[i].get<std::string>()) : std::nullopt;
      if (!s) throw ConfigError(field + ": slots are -X, +X, T1, T2");
      slots[i] = *s;
    }
    (std::string(side) == "side1" ? a.side1 : a.side2) = slots;
  }
  if (!a.Valid()) throw ConfigError(path + ": the two sides must use all four slots once");
  return a;
}

void ApplyDefaults(ExperimentConfig& c) {
  const std::string& cmd = c.command;
  if (cmd == "threshold") {
    if (c.sizes.empty()) c.sizes = {15, 20, 25};
    if (c.p_grid.empty()) c.p_grid = Grid(0.55, 0.70, 0.0125);
  } else if (cmd == "calibrate") {
    c.model = LatticeModel::kCubicBond;
    if (c.sizes.empty()) c.sizes = {16, 24, 32};
    if (c.p_grid.empty()) c.p_grid = Grid(0.23, 0.27, 0.005);
  } else if (cmd == "pi") {
    if (c.p_grid.empty()) c.p_grid = {c.gate.p_success};
  } else if (cmd == "channel") {
    if (c.cross_sections.empty()) c.cross_sections = {3, 4, 5, 6};
    if (c.lengths.empty()) c.lengths = {2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048};
  } else if (cmd == "loss") {
    if (c.sizes.empty()) c.sizes = {25};
    if (c.p_loss_grid.empty()) c.p_loss_grid = Grid(0.0, 0.03, 0.002);
  } else if (cmd == "heralded") {
    c.loss.mode = LossMode::kHeralded;
    if (c.sizes.empty()) c.sizes = {25};
    if (c.p_loss_grid.empty()) c.p_loss_grid = Grid(0.0, 0.40, 0.02);
  } else if (cmd == "renorm") {
    if (c.k_values.empty()) c.k_values = {4, 5, 6};
    if (c.blocks.empty()) c.blocks = {1, 2, 4, 8, 16, 32, 64, 128};
  } else if (cmd == "compare") {
    if (c.k_values.empty()) c.k_values = {4, 5, 6};
  }
}

void CheckCommandInputs(const ExperimentConfig& c) {
  if (c.command == "threshold" || c.command == "calibrate") {
    if (c.sizes.size() < 2) throw ConfigError("grids.sizes: need at least two sizes");
    if (c.p_grid.size() < 5) throw ConfigError("grids.p: need at least five points");
    if (!std::is_sorted(c.p_grid.begin(), c.p_grid.end())) {
      throw ConfigError("grids.p: must be ascending");
    }
  }
  if ((c.command == "channel") &&
      std::any_of(c.cross_sections.begin(), c.cross_sections.end(), [](int l) { return l < 2; })) {
    throw ConfigError("grids.cross_sections: entries must be >= 2");
  }
  if (c.command == "renorm" || c.command == "compare") {
    for (int k : c.k_values) {
      if (k < 2) throw ConfigError("grids.k: entries must be >= 2");
    }
  }
  if (c.command == "compare" && c.external.empty()) {
    throw ConfigError("compare.external: required (CSV of L,k points to compare against)");
  }
  if (c.model == LatticeModel::kCubicBond && c.command != "calibrate" && c.command != "pi" &&
      c.command != "threshold") {
    throw ConfigError("model: cubic_bond supports only pi, threshold and calibrate");
  }
}

}  // namespace

const std::vector<std::string>& Commands() {
  static const std::vector<std::string> commands = {
      "threshold", "pi",      "channel",      "loss",      "heralded", "renorm",
      "resources", "compare", "oracle-check", "calibrate", "dump"};
  return commands;
}

ModelConfig ExperimentConfig::Model() const {
  ModelConfig m;
  m.model = model;
  m.instance.dims = dims;
  m.instance.gate = gate;
  m.instance.loss = loss;
  m.instance.assignment = assignment;
  return m;
}

ExperimentConfig ParseConfig(const json& j) {
  CheckKeys(j, "", {"command", "seed", "n_runs", "model", "gate", "loss", "dims", "assignment",
                    "grids", "resources", "compare", "oracle", "output"});
  ExperimentConfig c;

  c.command = GetString(j, "", "command", "");
  if (c.command.empty()) throw ConfigError("command: required");
  const auto& cmds = Commands();
  if (std::find(cmds.begin(), cmds.end(), c.command) == cmds.end()) {
    throw ConfigError("command: unknown command '" + c.command + "'");
  }

  if (!j.contains("seed")) {
    throw ConfigError("seed: required; every run needs an explicit seed to be reproducible");
  }
  const json& seed = j.at("seed");
  if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
    throw ConfigError("seed: expected a non-negative 64-bit integer");
  }
  c.seed = seed.get<std::uint64_t>();

  const std::int64_t n_runs = GetInt(j, "", "n_runs", 10000);
  RequireAtLeast(n_runs, 1, "n_runs");
  c.n_runs = static_cast<std::uint64_t>(n_runs);

  const std::string model = GetString(j, "", "model", "microcluster");
  if (model == "microcluster") {
    c.model = LatticeModel::kMicrocluster;
  } else if (model == "cubic_bond") {
    c.model = LatticeModel::kCubicBond;
  } else {
    throw ConfigError("model: expected microcluster or cubic_bond");
  }

  if (j.contains("gate")) {
    const json& g = j.at("gate");
    CheckKeys(g, "gate", {"p_success", "scheme", "internal_failure"});
    c.gate.p_success = GetDouble(g, "gate", "p_success", c.gate.p_success);
    RequireProbability(c.gate.p_success, "gate.p_success");
    const std::string scheme = GetString(g, "gate", "scheme", "bell_ancilla");
    if (scheme == "bell_ancilla") {
      c.gate.scheme = GateScheme::kBellAncilla;
    } else if (scheme == "four_singles") {
      c.gate.scheme = GateScheme::kFourSingles;
    } else {
      throw ConfigError("gate.scheme: expected bell_ancilla or four_singles");
    }
    const std::string basis = GetString(g, "gate", "internal_failure", "XX");
    const auto p1 = basis.size() == 2 ? ParsePauli(basis.substr(0, 1)) : std::nullopt;
    const auto p2 = basis.size() == 2 ? ParsePauli(basis.substr(1, 1)) : std::nullopt;
    if (!p1 || !p2) throw ConfigError("gate.internal_failure: expected two Pauli letters");
    c.gate.failure_basis = {FusionMode::kRotated, *p1, *p2};
    if (!SiteRuleFor(c.gate.failure_basis)) {
      throw ConfigError("gate.internal_failure: supported values are XX and ZZ");
    }
  }

  if (j.contains("loss")) {
    const json& l = j.at("loss");
    CheckKeys(l, "loss", {"p_loss", "scope", "mode", "remedy"});
    c.loss.p_loss = GetDouble(l, "loss", "p_loss", 0.0);
    RequireProbability(c.loss.p_loss, "loss.p_loss", false);
    const auto scope = ParseScope(GetString(l, "loss", "scope", "data_and_ancilla"));
    if (!scope) throw ConfigError("loss.scope: expected data_only or data_and_ancilla");
    c.loss.scope = *scope;
    const auto mode = ParseLossMode(GetString(l, "loss", "mode", "unheralded"));
    if (!mode) throw ConfigError("loss.mode: expected unheralded or heralded");
    c.loss.mode = *mode;
    const auto remedy = ParseRemedy(GetString(l, "loss", "remedy", "cut_both"));
    if (!remedy) throw ConfigError("loss.remedy: expected cut_both, cut_lost or void_bond");
    c.loss.remedy = *remedy;
  }

  if (j.contains("dims")) {
    const json& d = j.at("dims");
    CheckKeys(d, "dims", {"lx", "ly", "lz"});
    for (auto [key, field] : {std::pair{"lx", &c.dims.lx}, std::pair{"ly", &c.dims.ly},
                              std::pair{"lz", &c.dims.lz}}) {
      const std::int64_t v = GetInt(d, "dims", key, *field);
      RequireAtLeast(v, 1, std::string("dims.") + key);
      if (v > 100000) throw ConfigError(std::string("dims.") + key + ": too large");
      *field = static_cast<int>(v);
    }
  }

  if (j.contains("assignment")) c.assignment = ParseAssignment(j.at("assignment"), "assignment");

  if (j.contains("grids")) {
    const json& g = j.at("grids");
    CheckKeys(g, "grids", {"p", "p_loss", "sizes", "lengths", "cross_sections", "blocks", "k"});
    c.p_grid = GetDoubleList(g, "grids", "p", true);
    c.p_loss_grid = GetDoubleList(g, "grids", "p_loss", true);
    for (std::size_t i = 0; i < c.p_loss_grid.size(); ++i) {
      RequireProbability(c.p_loss_grid[i], "grids.p_loss[" + std::to_string(i) + "]", false);
    }
    c.sizes = GetIntList(g, "grids", "sizes", 1);
    c.lengths = GetIntList(g, "grids", "lengths", 1);
    c.cross_sections = GetIntList(g, "grids", "cross_sections", 1);
    c.blocks = GetIntList(g, "grids", "blocks", 1);
    c.k_values = GetIntList(g, "grids", "k", 1);
  }

  if (j.contains("resources")) {
    const json& r = j.at("resources");
    CheckKeys(r, "resources", {"n", "k", "l", "count_mode"});
    for (auto [key, field] : {std::pair{"n", &c.shape.n}, std::pair{"k", &c.shape.k},
                              std::pair{"l", &c.shape.l}}) {
      const std::int64_t v = GetInt(r, "resources", key, static_cast<std::int64_t>(*field));
      RequireAtLeast(v, 1, std::string("resources.") + key);
      *field = static_cast<std::uint64_t>(v);
    }
    const std::string mode = GetString(r, "resources", "count_mode", "paper_compat");
    if (mode == "paper_compat") {
      c.count_mode = CountMode::kPaperCompat;
    } else if (mode == "formula") {
      c.count_mode = CountMode::kFormula;
    } else {
      throw ConfigError("resources.count_mode: expected paper_compat or formula");
    }
  }

  if (j.contains("compare")) {
    const json& r = j.at("compare");
    CheckKeys(r, "compare", {"external", "l_cap"});
    c.external = GetString(r, "compare", "external", "");
    const std::int64_t cap = GetInt(r, "compare", "l_cap", c.l_cap);
    RequireAtLeast(cap, 1, "compare.l_cap");
    c.l_cap = static_cast<int>(std::min<std::int64_t>(cap, 1 << 20));
  }

  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    CheckKeys(o, "oracle", {"random_instances"});
    const std::int64_t n = GetInt(o, "oracle", "random_instances", c.random_instances);
    RequireAtLeast(n, 0, "oracle.random_instances");
    c.random_instances = static_cast<int>(std::min<std::int64_t>(n, 100000));
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    CheckKeys(o, "output", {"dir", "format"});
    c.out_dir = GetString(o, "output", "dir", c.out_dir);
    c.format = GetString(o, "output", "format", c.format);
  }
  if (c.format != "csv" && c.format != "json") {
    throw ConfigError("output.format: expected csv or json");
  }

  ApplyDefaults(c);
  CheckCommandInputs(c);
  return c;
}

json ToJson(const ExperimentConfig& c) {
  json j;
  j["command"] = c.command;
  j["seed"] = c.seed;
  j["n_runs"] = c.n_runs;
  j["model"] = c.model == LatticeModel::kMicrocluster ? "microcluster" : "cubic_bond";
  j["gate"] = {{"p_success", c.gate.p_success},
               {"scheme", SchemeName(c.gate.scheme)},
               {"internal_failure", BasisName(c.gate.failure_basis)}};
  j["loss"] = {{"p_loss", c.loss.p_loss},
               {"scope", ScopeName(c.loss.scope)},
               {"mode", LossModeName(c.loss.mode)},
               {"remedy", RemedyName(c.loss.remedy)}};
  j["dims"] = {{"lx", c.dims.lx}, {"ly", c.dims.ly}, {"lz", c.dims.lz}};
  auto slots = [](const std::array<ArmSlot, 2>& s) {
    return json::array({SlotName(s[0]), SlotName(s[1])});
  };
  j["assignment"] = {{"side1", slots(c.assignment.side1)}, {"side2", slots(c.assignment.side2)}};
  json grids = json::object();
  if (!c.p_grid.empty()) grids["p"] = c.p_grid;
  if (!c.p_loss_grid.empty()) grids["p_loss"] = c.p_loss_grid;
  if (!c.sizes.empty()) grids["sizes"] = c.sizes;
  if (!c.lengths.empty()) grids["lengths"] = c.lengths;
  if (!c.cross_sections.empty()) grids["cross_sections"] = c.cross_sections;
  if (!c.blocks.empty()) grids["blocks"] = c.blocks;
  if (!c.k_values.empty()) grids["k"] = c.k_values;
  j["grids"] = grids;
  j["resources"] = {{"n", c.shape.n},
                    {"k", c.shape.k},
                    {"l", c.shape.l},
                    {"count_mode", c.count_mode == CountMode::kPaperCompat ? "paper_compat"
                                                                           : "formula"}};
  j["compare"] = {{"external", c.external}, {"l_cap", c.l_cap}};
  j["oracle"] = {{"random_instances", c.random_instances}};
  j["output"] = {{"dir", c.out_dir}, {"format", c.format}};
  return j;
}

json LoadConfigJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  const std::string csv_prefix = "# config ";
  if (text.rfind(csv_prefix, 0) == 0) {
    text = text.substr(csv_prefix.size(), text.find('\n') - csv_prefix.size());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": not valid JSON: " + e.what());
  }
  if (j.is_object() && j.contains("config") && !j.contains("command")) return j.at("config");
  return j;
}

std::string PiCsvHeader() { return "p,p_loss,lx,ly,lz,mode,n_runs,n_spanning,pi,ci_lo,ci_hi,seed"; }

namespace {

std::string Num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

std::string PiCsvRow(const ModelConfig& m, const RunStats& s) {
  const Dims& d = m.instance.dims;
  std::ostringstream os;
  os << Num(m.instance.gate.p_success) << ',' << Num(m.instance.loss.p_loss) << ',' << d.lx << ','
     << d.ly << ',' << d.lz << ','
     << (m.model == LatticeModel::kCubicBond ? std::string("cubic_bond")
                                             : std::string(LossModeName(m.instance.loss.mode)))
     << ',' << s.n_runs << ',' << s.n_spanning << ',' << Num(s.pi) << ',' << Num(s.ci95.lo) << ','
     << Num(s.ci95.hi) << ',' << s.seed;
  return os.str();
}

int ResolveWorkers(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("FUSIONPERC_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace {

struct Row {
  ModelConfig model;
  RunStats stats;
};

json RowJson(const Row& r) {
  const Dims& d = r.model.instance.dims;
  return {{"p", r.model.instance.gate.p_success},
          {"p_loss", r.model.instance.loss.p_loss},
          {"lx", d.lx},
          {"ly", d.ly},
          {"lz", d.lz},
          {"n_runs", r.stats.n_runs},
          {"n_spanning", r.stats.n_spanning},
          {"pi", r.stats.pi},
          {"ci_lo", r.stats.ci95.lo},
          {"ci_hi", r.stats.ci95.hi},
          {"seed", r.stats.seed}};
}

json FitJson(const FitResult& f) {
  json j = {{"amplitude", f.amplitude},
            {"decay_length", f.decay_length},
            {"residual", f.residual},
            {"points_used", f.points_used},
            {"converged", f.converged}};
  const double at = f.LengthAt(0.9);
  j["length_at_0.9"] = std::isfinite(at) ? json(at) : json(nullptr);
  return j;
}

json OptionalJson(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

class Writer {
 public:
  Writer(const ExperimentConfig& c, const RunContext& ctx) : c_(c), ctx_(ctx) {
    std::filesystem::create_directories(c.out_dir);
  }

  std::ostream& report() { return ctx_.report ? *ctx_.report : null_; }

  void Csv(const std::string& name, const std::string& header,
           const std::vector<std::string>& lines) {
    std::ofstream out(Path(name + ".csv"));
    out << "# config " << ToJson(c_).dump() << '\n' << header << '\n';
    for (const auto& l : lines) out << l << '\n';
    if (!out) throw std::runtime_error("cannot write " + Path(name + ".csv"));
  }

  void Json(const std::string& name, json body) {
    body["config"] = ToJson(c_);
    std::ofstream out(Path(name + ".json"));
    out << body.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + Path(name + ".json"));
  }

  /// Pi rows: CSV in csv format; always embedded in the JSON summary.
  void PiRows(const std::string& name, const std::vector<Row>& rows, json summary) {
    if (c_.format == "csv") {
      std::vector<std::string> lines;
      for (const Row& r : rows) lines.push_back(PiCsvRow(r.model, r.stats));
      Csv(name, PiCsvHeader(), lines);
    }
    json arr = json::array();
    for (const Row& r : rows) arr.push_back(RowJson(r));
    summary["rows"] = arr;
    Json(name, std::move(summary));
  }

  std::string Path(const std::string& file) const {
    return (std::filesystem::path(c_.out_dir) / file).string();
  }

 private:
  class NullBuf : public std::streambuf {
    int overflow(int c) override { return c; }
  };
  const ExperimentConfig& c_;
  const RunContext& ctx_;
  NullBuf null_buf_;
  std::ostream null_{&null_buf_};
};

RunOptions Options(const RunContext& ctx) {
  RunOptions o;
  o.workers = ctx.workers;
  if (ctx.log) {
    std::ostream* log = ctx.log;
    o.log = [log](const std::string& s) { *log << s << std::endl; };
  }
  return o;
}

void RunThreshold(const ExperimentConfig& c, const RunContext& ctx) {
  Writer w(c, ctx);
  const ModelConfig base = c.Model();
  const ThresholdData data = SweepThreshold(base, c.sizes, c.p_grid, c.n_runs, c.seed, Options(ctx));
  std::vector<Row> rows;
  for (std::size_t i = 0; i < c.sizes.size(); ++i) {
    for (std::size_t k = 0; k < c.p_grid.size(); ++k) {
      ModelConfig m = base;
      m.instance.dims = Dims::Cube(c.sizes[i]);
      m.instance.gate.p_success = c.p_grid[k];
      rows.push_back({m, data.stats[i][k]});
    }
  }
  json summary;
  try {
    const ThresholdEstimate est = EstimateThreshold(data.curves);
    summary["p_c"] = est.p_c;
    summary["spread"] = est.spread;
    summary["p_c_linear"] = OptionalJson(est.p_c_linear);
    json crossings = json::array();
    for (const Crossing& x : est.crossings) {
      crossings.push_back({{"l1", x.l1},
                           {"l2", x.l2},
                           {"logistic", OptionalJson(x.logistic)},
                           {"linear", OptionalJson(x.linear)},
                           {"value", x.value()}});
    }
    summary["crossings"] = crossings;
    json fits = json::array();
    for (const auto& [l, f] : est.fits) {
      fits.push_back({{"l", l},
                      {"a", f.a},
                      {"b", f.b},
                      {"location", f.location()},
                      {"width", f.width()},
                      {"converged", f.converged}});
    }
    summary["fits"] = fits;
    w.PiRows(c.command, rows, summary);
    w.report() << c.command << ": p_c = " << Num(est.p_c) << " (pairwise spread "
               << Num(est.spread) << ")\n";
  } catch (const FitError& e) {
    summary["fit_error"] = e.what();
    w.PiRows(c.command, rows, summary);
    throw;
  }
}

void RunPi(const ExperimentConfig& c, const RunContext& ctx) {
  Writer w(c, ctx);
  std::vector<Row> rows;
  const std::vector<double> loss_grid =
      c.p_loss_grid.empty() ? std::vector<double>{c.loss.p_loss} : c.p_loss_grid;
  for (double p : c.p_grid) {
    for (double pl : loss_grid) {
      ModelConfig m = c.Model();
      m.instance.gate.p_success = p;
      m.instance.loss.p_loss = pl;
      const RunStats s = EstimatePi(m, c.n_runs, c.seed, Options(ctx));
      rows.push_back({m, s});
      w.report() << "pi p=" << Num(p) << " p_loss=" << Num(pl) << ": " << Num(s.pi) << " ["
                 << Num(s.ci95.lo) << ", " << Num(s.ci95.hi) << "]\n";
    }
  }
  w.PiRows(c.command, rows, json::object());
}

void RunChannel(const ExperimentConfig& c, const RunContext& ctx) {
  Writer w(c, ctx);
  std::vector<Row> rows;
  json fits = json::array();
  for (int l : c.cross_sections) {
    const ChannelResult res = ChannelSweep(c.Model(), l, c.lengths, c.n_runs, c.seed, Options(ctx));
    for (std::size_t i = 0; i < res.lengths.size(); ++i) {
      ModelConfig m = c.Model();
      m.instance.dims = {res.lengths[i], l, l};
      rows.push_back({m, res.stats[i]});
    }
    json f = {{"cross_section", l}};
    if (res.fit) {
      f["fit"] = FitJson(*res.fit);
      w.report() << "channel L=" << l << ": decay length " << Num(res.fit->decay_length)
                 << ", length at Pi=0.9 " << Num(res.fit->LengthAt(0.9)) << '\n';
    } else {
      f["fit_error"] = res.fit_error;
      w.report() << "channel L=" << l << ": no fit (" << res.fit_error << ")\n";
    }
    fits.push_back(f);
  }
  w.PiRows(c.command, rows, {{"fits", fits}});
}

void RunLoss(const ExperimentConfig& c, const RunContext& ctx) {
  Writer w(c, ctx);
  std::vector<Row> rows;
  json tolerances = json::array();
  for (int l : c.sizes) {
    const LossSweepResult res = LossSweep(c.Model(), l, c.p_loss_grid, c.n_runs, c.seed, Options(ctx));
    for (std::size_t i = 0; i < res.p_loss.size(); ++i) {
      ModelConfig m = c.Model();
      m.instance.dims = Dims::Cube(l);
      m.instance.loss.p_loss = res.p_loss[i];
      rows.push_back({m, res.stats[i]});
    }
    tolerances.push_back(
        {{"l", l}, {"tolerance_at_0.9", OptionalJson(res.tolerance)}, {"bracketed", res.bracketed}});
    w.report() << c.command << " L=" << l << ": tolerance at Pi=0.9 "
               << (res.tolerance ? Num(*res.tolerance) : std::string("none"))
               << (res.bracketed ? "" : " (not bracketed by the grid)") << '\n';
  }
  w.PiRows(c.command, rows, {{"tolerances", tolerances}});
}

void RunRenorm(const ExperimentConfig& c, const RunContext& ctx) {
  Writer w(c, ctx);
  std::vector<Row> rows;
  json fits = json::array();
  for (int k : c.k_values) {
    const RenormResult res =
        RenormalizedChannel(c.Model(), k, c.blocks, c.n_runs, c.seed, Options(ctx));
    for (std::size_t i = 0; i < res.n_blocks.size(); ++i) {
      ModelConfig m = c.Model();
      m.instance.dims = {k * res.n_blocks[i], k, k};
      rows.push_back({m, res.stats[i]});
    }
    json f = {{"k", k}};
    if (res.fit) {
      f["fit"] = FitJson(*res.fit);
      w.report() << "renorm k=" << k << ": decay length " << Num(res.fit->decay_length)
                 << " blocks, blocks at Pi=0.9 " << Num(res.fit->LengthAt(0.9)) << '\n';
    } else {
      f["fit_error"] = res.fit_error;
      w.report() << "renorm k=" << k << ": no fit (" << res.fit_error << ")\n";
    }
    fits.push_back(f);
  }
  w.PiRows(c.command, rows, {{"fits", fits}});
}

void RunResources(const ExperimentConfig& c, const RunContext& ctx) {
  Writer w(c, ctx);
  const LatticeCounts counts = LatticeResources(c.shape);
  const OpticalElements el = ElementsPerFusion();
  std::vector<std::pair<std::string, std::string>> kv = {
      {"sites", std::to_string(counts.sites)},
      {"ghz", std::to_string(counts.ghz)},
      {"fusions", std::to_string(counts.fusions)},
      {"polarization_rotators_per_fusion", std::to_string(el.polarization_rotators)},
      {"polarizing_beamsplitters_per_fusion", std::to_string(el.polarizing_beamsplitters)}};
  json sources = json::object();
  for (const auto& [name, spec] : {std::pair{"ghz3", SourceSpec::Ghz3()},
                                   std::pair{"ghz4", SourceSpec::Ghz4()}}) {
    const Repeats r = MultiplexRepeats(spec);
    const std::uint64_t formula = BellPairsPerGhz(spec, CountMode::kFormula);
    const std::uint64_t compat = BellPairsPerGhz(spec, CountMode::kPaperCompat);
    sources[name] = {{"repeats_formula", r.formula},
                     {"repeats_paper_compat", r.paper_compat ? json(*r.paper_compat) : json()},
                     {"bell_pairs_formula", formula},
                     {"bell_pairs_paper_compat", compat}};
    kv.emplace_back(std::string(name) + "_repeats_formula", std::to_string(r.formula));
    kv.emplace_back(std::string(name) + "_repeats_paper_compat",
                    r.paper_compat ? std::to_string(*r.paper_compat) : "");
    kv.emplace_back(std::string(name) + "_bell_pairs_formula", std::to_string(formula));
    kv.emplace_back(std::string(name) + "_bell_pairs_paper_compat", std::to_string(compat));
  }
  const std::uint64_t per_ghz = BellPairsPerGhz(SourceSpec::Ghz3(), c.count_mode);
  kv.emplace_back("bell_pairs_total", std::to_string(per_ghz * counts.ghz));
  json ghz = json::array();
  for (int n = 2; n <= 8; ++n) {
    const Rational r = GhzSuccessRational(n);
    ghz.push_back({{"n", n}, {"num", r.num}, {"den", r.den}, {"value", r.value()}});
    kv.emplace_back("ghz_success_" + std::to_string(n),
                    std::to_string(r.num) + "/" + std::to_string(r.den));
  }
  if (c.format == "csv") {
    std::vector<std::string> lines;
    for (const auto& [k, v] : kv) lines.push_back(k + "," + v);
    w.Csv("resources", "quantity,value", lines);
  }
  w.Json("resources", {{"counts",
                        {{"sites", counts.sites}, {"ghz", counts.ghz}, {"fusions", counts.fusions}}},
                       {"elements_per_fusion",
                        {{"polarization_rotators", el.polarization_rotators},
                         {"polarizing_beamsplitters", el.polarizing_beamsplitters}}},
                       {"sources", sources},
                       {"bell_pairs_total", per_ghz * counts.ghz},
                       {"ghz_success", ghz}});
  w.report() << "resources: sites " << counts.sites << ", ghz " << counts.ghz << ", fusions "
             << counts.fusions << ", Bell pairs " << per_ghz * counts.ghz << '\n';
}

void RunCompare(const ExperimentConfig& c, const RunContext& ctx) {
  Writer w(c, ctx);
  const std::vector<SizePoint> theirs = ReadSizePoints(c.external);
  std::vector<SizePoint> ours;
  json searches = json::array();
  for (int k : c.k_values) {
    const MaxLResult r = MaxLAtHalf(k, c.Model(), c.n_runs, c.seed, c.l_cap, Options(ctx));
    ours.push_back({r.max_l, k});
    json evals = json::array();
    for (const auto& [l, s] : r.evaluations) evals.push_back({{"l", l}, {"pi", s.pi}});
    searches.push_back({{"k", k}, {"max_l", r.max_l}, {"capped", r.capped}, {"evaluations", evals}});
    w.report() << "compare k=" << k << ": max L with Pi >= 1/2 is " << r.max_l
               << (r.capped ? " (search cap)" : "") << '\n';
  }
  const auto rows = SchemeComparison(ours, theirs, c.count_mode);
  std::vector<std::string> max_l_lines;
  for (const SizePoint& p : ours) max_l_lines.push_back(std::to_string(p.l) + "," + std::to_string(p.k));
  json table = json::array();
  for (const ComparisonRow& r : rows) {
    table.push_back({{"L", r.l},
                     {"k_ours", r.k_ours},
                     {"bell_ours", r.bell_ours},
                     {"k_theirs", r.k_theirs},
                     {"bell_theirs", r.bell_theirs},
                     {"ratio", r.ratio}});
  }
  if (c.format == "csv") {
    w.Csv("max_l", "L,k", max_l_lines);
    std::ostringstream os;
    WriteComparisonCsv(os, rows);
    std::string text = os.str();
    std::vector<std::string> lines;
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) lines.push_back(line);
    w.Csv("compare", "L,k_ours,bell_ours,k_theirs,bell_theirs,ratio", lines);
  }
  w.Json("compare", {{"max_l", searches}, {"comparison", table}});
  w.report() << "compare: " << rows.size() << " of " << theirs.size()
             << " external points matched\n";
}

void RunOracleCheck(const ExperimentConfig& c, const RunContext& ctx) {
  Writer w(c, ctx);
  const auto reports = RunAllSuites(c.seed, c.random_instances);
  json suites = json::array();
  bool all = true;
  for (const SuiteReport& r : reports) {
    json ex = json::array();
    for (const CaseFailure& f : r.examples) {
      ex.push_back({{"description", f.description}, {"fragment", f.fragment}});
    }
    suites.push_back({{"name", r.name},
                      {"cases", r.cases},
                      {"failures", r.failures},
                      {"passed", r.passed()},
                      {"examples", ex}});
    all = all && r.passed();
    w.report() << "oracle-check " << r.name << ": " << r.cases - r.failures << "/" << r.cases
               << (r.passed() ? " pass" : " FAIL") << '\n';
  }
  w.Json("oracle_check", {{"suites", suites}, {"passed", all}});
  if (!all) throw std::runtime_error("oracle-check: fast rules disagree with the tableau");
}

void RunDump(const ExperimentConfig& c, const RunContext& ctx) {
  if (c.model != LatticeModel::kMicrocluster) {
    throw ConfigError("model: dump needs the microcluster model");
  }
  Writer w(c, ctx);
  InstanceParams params = c.Model().instance;
  const PercolationGraph g = BuildInstance(params, RunRng(c.seed, 0));
  std::ofstream out(w.Path("instance.txt"));
  WriteInstance(out, g);
  if (!out) throw std::runtime_error("cannot write " + w.Path("instance.txt"));
  w.report() << "dump: " << g.bonds.size() << " bonds, spans " << (Spans(g) ? "yes" : "no")
             << '\n';
}

}  // namespace

void RunExperiment(const ExperimentConfig& c, const RunContext& ctx) {
  c.Model().Validate();
  const std::string& cmd = c.command;
  if (cmd == "threshold" || cmd == "calibrate") {
    RunThreshold(c, ctx);
  } else if (cmd == "pi") {
    RunPi(c, ctx);
  } else if (cmd == "channel") {
    RunChannel(c, ctx);
  } else if (cmd == "loss" || cmd == "heralded") {
    RunLoss(c, ctx);
  } else if (cmd == "renorm") {
    RunRenorm(c, ctx);
  } else if (cmd == "resources") {
    RunResources(c, ctx);
  } else if (cmd == "compare") {
    RunCompare(c, ctx);
  } else if (cmd == "oracle-check") {
    RunOracleCheck(c, ctx);
  } else if (cmd == "dump") {
    RunDump(c, ctx);
  } else {
    throw ConfigError("command: unknown command '" + cmd + "'");
  }
}

}  // namespace fusionperc::cli
