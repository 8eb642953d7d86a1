/*
 * Copyright 2026 The ismtree Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end: demo-gen, learn, recognize, predict, optimize-topology, asr-sim,
// bench and report.
//
// Parameter precedence: built-in defaults < --config file < ISM_* environment < flags.
// Exit codes: 0 ok, 2 bad arguments, 3 file or parse error, 4 domain error. Failures print
// one JSON record on stderr.

#include "ismtree/errors.hpp"
#include "ismtree/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

using namespace ismtree;
using ismtree::io::json;

namespace {

/// Bad command-line or environment values (exit 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int fail(int code, const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}, {"exitCode", code}}.dump() << "\n";
  return code;
}

struct Settings {
  RecognitionParams recognition;
  std::uint64_t seed = 0;
  std::size_t samples = 100;
  bool verbose = false;
};

double parseNumber(const std::string& name, const std::string& text) {
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError(name + " is not a number: " + text);
  return value;
}

std::uint64_t parseCount(const std::string& name, const std::string& text) {
  const double value = parseNumber(name, text);
  if (value < 0 || value != static_cast<double>(static_cast<std::uint64_t>(value))) {
    throw UsageError(name + " must be a non-negative integer: " + text);
  }
  return static_cast<std::uint64_t>(value);
}

// Flags, environment variables and config keys for every shared parameter.
struct ParamBinding {
  const char* flag;
  const char* env;
  const char* key;
  bool integer;
  std::function<void(Settings&, double)> set;
};

const std::vector<ParamBinding>& bindings() {
  static const std::vector<ParamBinding> table{
      {"--bin-size", "ISM_BIN_SIZE", "binSize", false,
       [](Settings& s, double v) { s.recognition.binSize = v; }},
      {"--tau-pos", "ISM_TAU_POS", "positionTolerance", false,
       [](Settings& s, double v) { s.recognition.positionTolerance = v; }},
      {"--tau-rot", "ISM_TAU_ROT", "orientationToleranceDeg", false,
       [](Settings& s, double v) { s.recognition.orientationToleranceDeg = v; }},
      {"--eps-r", "ISM_EPS_R", "assemblyThreshold", false,
       [](Settings& s, double v) { s.recognition.assemblyThreshold = v; }},
      {"--keep-threshold", "ISM_KEEP_THRESHOLD", "resultKeepThreshold", false,
       [](Settings& s, double v) { s.recognition.resultKeepThreshold = v; }},
      {"--max-passed-up", "ISM_MAX_PASSED_UP", "maxResultsPassedUp", true,
       [](Settings& s, double v) { s.recognition.maxResultsPassedUp = static_cast<std::size_t>(v); }},
      {"--seed", "ISM_SEED", "seed", true,
       [](Settings& s, double v) { s.seed = static_cast<std::uint64_t>(v); }},
      {"--samples", "ISM_SAMPLES", "samples", true,
       [](Settings& s, double v) { s.samples = static_cast<std::size_t>(v); }},
  };
  return table;
}

class Cli {
 public:
  Cli() : app_("Learn ISM trees, recognize scenes and predict object poses.", "ism") {
    app_.require_subcommand(1);
    // Shared flags may also follow the subcommand.
    app_.fallthrough();
    app_.set_version_flag("--version", "1.0");
    app_.add_option("--config", configPath_, "JSON file with parameter defaults");
    app_.add_flag("-v,--verbose", settings_.verbose, "Progress messages on stderr");
    for (const ParamBinding& b : bindings()) {
      flagValues_[b.flag] = std::string();
      app_.add_option(b.flag, flagValues_[b.flag],
                      std::string("Overrides ") + b.env + " and config key \"" + b.key + "\"");
    }
    addDemoGen();
    addLearn();
    addRecognize();
    addPredict();
    addOptimize();
    addAsr();
    addBench();
    addReport();
  }

  int run(int argc, char** argv) {
    try {
      app_.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app_.exit(e);
    } catch (const CLI::CallForVersion& e) {
      return app_.exit(e);
    } catch (const CLI::ParseError& e) {
      return fail(2, "BadArguments", e.what());
    }
    try {
      resolveSettings();
      command_();
      return 0;
    } catch (const UsageError& e) {
      return fail(2, "BadArguments", e.what());
    } catch (const FormatError& e) {
      return fail(3, "FormatError", e.what());
    } catch (const DomainError& e) {
      return fail(4, e.kind(), e.what());
    }
  }

 private:
  void resolveSettings() {
    std::map<std::string, std::string> fromFlags;
    for (const auto& [flag, value] : flagValues_) {
      if (app_.count(flag) > 0) fromFlags[flag] = value;
    }
    if (!configPath_.empty()) {
      const json config = io::readJsonFile(configPath_);
      if (!config.is_object()) throw FormatError(configPath_ + " must hold a JSON object");
      for (const auto& [key, value] : config.items()) {
        const ParamBinding* binding = nullptr;
        for (const ParamBinding& b : bindings()) {
          if (key == b.key) binding = &b;
        }
        if (key == "version") continue;
        if (!binding) throw FormatError("unknown config key \"" + key + "\"");
        if (!value.is_number()) throw FormatError("config key \"" + key + "\" must be a number");
        const double v = value.get<double>();
        if (binding->integer && (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v)))) {
          throw FormatError("config key \"" + key + "\" must be a non-negative integer");
        }
        binding->set(settings_, v);
      }
    }
    for (const ParamBinding& b : bindings()) {
      if (const char* env = std::getenv(b.env); env && *env) {
        b.set(settings_, b.integer ? static_cast<double>(parseCount(b.env, env)) : parseNumber(b.env, env));
      }
    }
    for (const ParamBinding& b : bindings()) {
      const auto it = fromFlags.find(b.flag);
      if (it == fromFlags.end()) continue;
      b.set(settings_, b.integer ? static_cast<double>(parseCount(b.flag, it->second))
                                 : parseNumber(b.flag, it->second));
    }
    try {
      settings_.recognition.validate();
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    if (settings_.samples == 0) throw UsageError("--samples must be positive");
  }

  void log(const std::string& message) const {
    if (settings_.verbose) std::cerr << "ism: " << message << "\n";
  }

  /// Writes to `path`, or stdout when the path is empty or "-".
  static void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
      std::cout << text;
    } else {
      io::writeTextFile(path, text);
    }
  }

  static MotionModel motionFrom(const std::string& text) {
    if (text == "static") return MotionModel::Static;
    if (text == "jitter") return MotionModel::Jitter;
    if (text == "rigid-groups") return MotionModel::RigidGroups;
    throw UsageError("unknown motion model " + text);
  }

  static PerturbationKind perturbationFrom(const std::string& text) {
    if (text == "swap") return PerturbationKind::Swap;
    if (text == "shift") return PerturbationKind::Shift;
    if (text == "rotate") return PerturbationKind::Rotate;
    if (text == "mixed") return PerturbationKind::Mixed;
    throw UsageError("unknown perturbation " + text);
  }

  // "1,2;4,5" -> {{1,2},{4,5}}
  static std::vector<std::vector<std::size_t>> groupsFrom(const std::string& text) {
    std::vector<std::vector<std::size_t>> groups;
    std::stringstream all(text);
    std::string group;
    while (std::getline(all, group, ';')) {
      std::vector<std::size_t> members;
      std::stringstream in(group);
      std::string item;
      while (std::getline(in, item, ',')) members.push_back(parseCount("--groups", item));
      if (!members.empty()) groups.push_back(members);
    }
    return groups;
  }

  static std::vector<std::size_t> rangeFrom(const std::string& name, const std::string& text) {
    std::vector<std::size_t> values;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
      const auto lo = parseCount(name, text.substr(0, dots));
      const auto hi = parseCount(name, text.substr(dots + 2));
      if (hi < lo) throw UsageError(name + " range is empty");
      for (auto v = lo; v <= hi; ++v) values.push_back(v);
      return values;
    }
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) values.push_back(parseCount(name, item));
    if (values.empty()) throw UsageError(name + " is empty");
    return values;
  }

  std::vector<ObjectState> loadInputs(const std::string& inputPath, const std::string& datasetPath,
                                      std::size_t timestep) const {
    if (!inputPath.empty()) return io::configurationFromJson(io::readJsonFile(inputPath));
    if (datasetPath.empty()) throw UsageError("give --input or --dataset with --timestep");
    const DemonstrationDataset dataset = io::datasetFromJson(io::readJsonFile(datasetPath));
    if (timestep < 1 || timestep > dataset.length()) {
      throw UsageError("--timestep must lie in [1, " + std::to_string(dataset.length()) + "]");
    }
    return dataset.configurationAt(timestep - 1);
  }

  // ------------------------------------------------------------------ demo-gen
  void addDemoGen() {
    auto* cmd = app_.add_subcommand("demo-gen", "Generate a synthetic demonstration");
    auto* o = &demo_;
    cmd->add_option("--scenario", o->scenario, "Scenario JSON (overrides the shape flags)");
    cmd->add_option("--category", o->spec.categoryLabel, "Scene category label");
    cmd->add_option("-n,--objects", o->spec.objectCount, "Number of objects");
    cmd->add_option("-l,--length", o->spec.length, "Demonstration length");
    cmd->add_option("--motion", o->motion, "static | jitter | rigid-groups");
    cmd->add_option("--jitter-pos", o->spec.jitterPosition, "Position jitter sigma (m)");
    cmd->add_option("--jitter-rot", o->spec.jitterOrientationDeg, "Orientation jitter sigma (deg)");
    cmd->add_option("--groups", o->groups, "Rigid groups, e.g. \"1,2;3,4\"");
    cmd->add_option("--group-spacing", o->spec.groupSpacing, "Spacing inside a group (m)");
    cmd->add_option("--group-travel", o->spec.groupTravel, "Group sweep length (m)");
    cmd->add_option("-o,--output", o->output, "Dataset file (default stdout)");
    cmd->add_option("--testset-out", o->testsetOut, "Also write a perturbed test set");
    cmd->add_option("--perturbation", o->perturbation, "swap | shift | rotate | mixed");
    cmd->add_option("--magnitude", o->magnitude, "Shift (m) or rotation (deg) magnitude");
    cmd->add_option("--count", o->count, "Test set size");
    cmd->callback([this] { command_ = [this] { runDemoGen(); }; });
  }

  void runDemoGen() {
    ScenarioSpec spec = demo_.spec;
    if (!demo_.scenario.empty()) {
      spec = io::scenarioFromJson(io::readJsonFile(demo_.scenario));
    } else {
      spec.motion = motionFrom(demo_.motion);
      spec.rigidGroups = groupsFrom(demo_.groups);
    }
    spec.seed = settings_.seed;
    const DemonstrationDataset dataset = generateDemonstration(spec);
    log("generated " + std::to_string(dataset.objects().size()) + " objects x " +
        std::to_string(dataset.length()) + " timesteps");
    emit(demo_.output, io::dump(io::toJson(dataset)));
    if (!demo_.testsetOut.empty()) {
      const TestSet set = generatePerturbedTestSet(dataset, perturbationFrom(demo_.perturbation),
                                                   demo_.magnitude, demo_.count, settings_.seed,
                                                   settings_.recognition);
      io::writeTextFile(demo_.testsetOut, io::dump(io::toJson(set)));
    }
  }

  // --------------------------------------------------------------------- learn
  void addLearn() {
    auto* cmd = app_.add_subcommand("learn", "Learn an ISM tree from a demonstration");
    cmd->add_option("--dataset", learn_.dataset, "Dataset file")->required();
    cmd->add_option("--topology", learn_.topology, "star | complete | optimized | file:<path>");
    cmd->add_option("--testset", learn_.testset, "Test set for --topology optimized");
    cmd->add_option("--budget", learn_.search.iterationBudget, "Accepted moves for the search");
    cmd->add_option("-o,--output", learn_.output, "Tree file (default stdout)");
    cmd->callback([this] { command_ = [this] { runLearn(); }; });
  }

  /// Test set used by the topology search when none is given.
  TestSet defaultTestSet(const DemonstrationDataset& dataset) const {
    return generatePerturbedTestSet(dataset, PerturbationKind::Mixed,
                                    1.5 * settings_.recognition.positionTolerance, 40,
                                    settings_.seed, settings_.recognition);
  }

  RelationTopology optimizedTopology(const DemonstrationDataset& dataset, const std::string& testset,
                                     SearchParams search) const {
    search.recognition = settings_.recognition;
    const TestSet set = testset.empty() ? defaultTestSet(dataset)
                                        : io::testSetFromJson(io::readJsonFile(testset));
    return selectTopology(dataset, set, search);
  }

  void runLearn() {
    const DemonstrationDataset dataset = io::datasetFromJson(io::readJsonFile(learn_.dataset));
    dataset.validate();
    RelationTopology topology;
    const std::string& t = learn_.topology;
    if (t == "star") {
      topology = RelationTopology::star(dataset.objects());
    } else if (t == "complete") {
      topology = RelationTopology::complete(dataset.objects());
    } else if (t == "optimized") {
      topology = optimizedTopology(dataset, learn_.testset, learn_.search);
    } else if (t.rfind("file:", 0) == 0) {
      topology = io::topologyFromJson(io::readJsonFile(t.substr(5)));
    } else {
      throw UsageError("unknown --topology " + t);
    }
    const IsmTree tree = learnIsmTree(dataset, topology);
    log("learned " + std::to_string(tree.isms.size()) + " ISM(s), height " +
        std::to_string(tree.height()));
    emit(learn_.output, io::dump(io::toJson(tree)));
  }

  // ----------------------------------------------------------------- recognize
  void addRecognize() {
    auto* cmd = app_.add_subcommand("recognize", "Recognize scene instances");
    cmd->add_option("--tree", recognize_.tree, "Tree file")->required();
    cmd->add_option("--input", recognize_.input, "Configuration file");
    cmd->add_option("--dataset", recognize_.dataset, "Use a demonstrated configuration instead");
    cmd->add_option("--timestep", recognize_.timestep, "1-based timestep for --dataset");
    cmd->add_option("-o,--output", recognize_.output, "Report file (default stdout)");
    cmd->add_flag("--table", recognize_.table, "Print the report as a table instead of JSON");
    cmd->callback([this] { command_ = [this] { runRecognize(); }; });
  }

  void runRecognize() {
    const IsmTree tree = io::treeFromJson(io::readJsonFile(recognize_.tree));
    const auto inputs = loadInputs(recognize_.input, recognize_.dataset, recognize_.timestep);
    const auto instances = recognizeScene(inputs, tree, settings_.recognition);
    log(std::to_string(instances.size()) + " instance(s)");
    const json report = io::reportToJson(instances, tree);
    emit(recognize_.output, recognize_.table ? io::renderReportTable(report) : io::dump(report));
  }

  // ------------------------------------------------------------------- predict
  void addPredict() {
    auto* cmd = app_.add_subcommand("predict", "Predict poses of objects missing from an instance");
    cmd->add_option("--tree", predict_.tree, "Tree file")->required();
    cmd->add_option("--input", predict_.input, "Configuration file");
    cmd->add_option("--dataset", predict_.dataset, "Use a demonstrated configuration instead");
    cmd->add_option("--timestep", predict_.timestep, "1-based timestep for --dataset");
    cmd->add_option("-o,--output", predict_.output, "Cloud file (default stdout)");
    cmd->callback([this] { command_ = [this] { runPredict(); }; });
  }

  void runPredict() {
    const IsmTree tree = io::treeFromJson(io::readJsonFile(predict_.tree));
    const auto inputs = loadInputs(predict_.input, predict_.dataset, predict_.timestep);
    const auto instances = recognizeScene(inputs, tree, settings_.recognition);
    if (instances.empty()) {
      throw DomainError("NoInstance", "no scene instance reaches the assembly threshold");
    }
    std::mt19937_64 rng(settings_.seed);
    const PredictionCloud cloud = generateCloudOfPosePredictions(
        instances.front(), tree, computeShortestPaths(tree), settings_.samples, rng);
    json j = io::toJson(cloud);
    j["instance"] = json{{"confidence", instances.front().confidence},
                         {"pose", io::toJson(instances.front().pose)}};
    emit(predict_.output, io::dump(j));
  }

  // --------------------------------------------------------- optimize-topology
  void addOptimize() {
    auto* cmd = app_.add_subcommand("optimize-topology", "Search a relation topology");
    cmd->add_option("--dataset", optimize_.dataset, "Dataset file")->required();
    cmd->add_option("--testset", optimize_.testset, "Test set file (default: generated)");
    cmd->add_option("--budget", optimize_.search.iterationBudget, "Accepted moves");
    cmd->add_option("--fp-weight", optimize_.search.fpWeight, "Weight of numFPs per percent");
    cmd->add_option("--duration", optimize_.duration, "work | wall");
    cmd->add_option("-o,--output", optimize_.output, "Topology file (default stdout)");
    cmd->callback([this] { command_ = [this] { runOptimize(); }; });
  }

  void runOptimize() {
    const DemonstrationDataset dataset = io::datasetFromJson(io::readJsonFile(optimize_.dataset));
    SearchParams search = optimize_.search;
    if (optimize_.duration == "wall") {
      search.duration = DurationMeasure::WallClock;
    } else if (optimize_.duration != "work") {
      throw UsageError("--duration must be work or wall");
    }
    const RelationTopology topology = optimizedTopology(dataset, optimize_.testset, search);
    log("selected " + std::to_string(topology.relations().size()) + " relation(s)");
    emit(optimize_.output, io::dump(io::toJson(topology)));
  }

  // ------------------------------------------------------------------- asr-sim
  void addAsr() {
    auto* cmd = app_.add_subcommand("asr-sim", "Simulate active scene recognition");
    cmd->add_option("--world", asr_.world, "World file");
    cmd->add_option("--tree", asr_.trees, "Tree file (repeatable)");
    cmd->add_option("--mode", asr_.mode, "prediction | sweep | boxes");
    cmd->add_option("-o,--output", asr_.output, "JSONL log (default stdout)");
    cmd->add_option("--replay", asr_.replay, "Summarize an existing log instead of simulating");
    cmd->callback([this] { command_ = [this] { runAsr(); }; });
  }

  void runAsr() {
    if (!asr_.replay.empty()) {
      const AsrLog log = io::asrLogFromJsonl(io::readTextFile(asr_.replay));
      std::ostringstream out;
      for (const AsrLogEntry& e : log.entries) {
        out << toString(e.state);
        if (e.view) {
          char view[96];
          std::snprintf(view, sizeof view, " view (%.2f, %.2f, %.1f deg)", e.view->position.x(),
                        e.view->position.y(), radToDeg(e.view->yaw));
          out << view;
        }
        for (const ObjectId& id : e.detected) out << " +" << id.str();
        if (!e.note.empty()) out << " [" << e.note << "]";
        out << "\n";
      }
      out << "views " << log.adoptedViews << "/" << log.viewCap << ", found " << log.found.size()
          << (log.allFound ? " (all)" : " (incomplete)") << "\n";
      emit("", out.str());
      return;
    }
    if (asr_.world.empty() || asr_.trees.empty()) {
      throw UsageError("asr-sim needs --world and at least one --tree (or --replay)");
    }
    const io::WorldFile world = io::worldFromJson(io::readJsonFile(asr_.world));
    std::vector<IsmTree> trees;
    for (const std::string& path : asr_.trees) trees.push_back(io::treeFromJson(io::readJsonFile(path)));
    AsrParams params;
    params.recognition = settings_.recognition;
    params.predictionsPerObject = settings_.samples;
    params.seed = settings_.seed;
    params.hints = world.hints;
    if (asr_.mode == "sweep") {
      params.usePrediction = false;
      params.hints.clear();
    } else if (asr_.mode == "boxes") {
      params.usePrediction = false;
      params.searchBoxes = world.boxes;
    } else if (asr_.mode != "prediction") {
      throw UsageError("--mode must be prediction, sweep or boxes");
    }
    const AsrLog log = runAsrSimulation(world.world, trees, params);
    this->log(std::to_string(log.adoptedViews) + " view(s), all found: " +
              (log.allFound ? "yes" : "no"));
    emit(asr_.output, io::asrLogToJsonl(log));
  }

  // --------------------------------------------------------------------- bench
  void addBench() {
    auto* cmd = app_.add_subcommand("bench", "Time recognition or prediction over an (n, l) grid");
    cmd->add_option("--kind", bench_.kind, "recognition | prediction");
    cmd->add_option("--n", bench_.n, "Object counts, e.g. 3..10 or 3,5");
    cmd->add_option("--l", bench_.l, "Lengths, e.g. 25,100,400");
    cmd->add_option("--repetitions", bench_.params.repetitions, "Timed runs per cell");
    cmd->add_option("-o,--output", bench_.output, "CSV file (default stdout)");
    cmd->callback([this] { command_ = [this] { runBench(); }; });
  }

  void runBench() {
    std::vector<std::pair<std::size_t, std::size_t>> grid;
    for (std::size_t n : rangeFrom("--n", bench_.n)) {
      for (std::size_t l : rangeFrom("--l", bench_.l)) grid.emplace_back(n, l);
    }
    BenchParams params = bench_.params;
    params.seed = settings_.seed;
    params.recognition = settings_.recognition;
    std::vector<BenchRow> rows;
    if (bench_.kind == "recognition") {
      rows = benchRecognition(grid, params);
    } else if (bench_.kind == "prediction") {
      rows = benchPrediction(grid, settings_.samples, params);
    } else {
      throw UsageError("--kind must be recognition or prediction");
    }
    emit(bench_.output, io::benchToCsv(rows));
  }

  // -------------------------------------------------------------------- report
  void addReport() {
    auto* cmd = app_.add_subcommand("report", "Render a recognition report as a table");
    cmd->add_option("report", report_.input, "Report file written by recognize")->required();
    cmd->add_option("-o,--output", report_.output, "Text file (default stdout)");
    cmd->callback([this] { command_ = [this] { runReport(); }; });
  }

  void runReport() {
    emit(report_.output, io::renderReportTable(io::readJsonFile(report_.input)));
  }

  CLI::App app_;
  Settings settings_;
  std::string configPath_;
  std::map<std::string, std::string> flagValues_;
  std::function<void()> command_;

  struct {
    std::string scenario, motion = "static", groups, output, testsetOut, perturbation = "mixed";
    ScenarioSpec spec;
    double magnitude = 0.15;
    std::size_t count = 40;
  } demo_;
  struct {
    std::string dataset, topology = "star", testset, output;
    SearchParams search;
  } learn_;
  struct {
    std::string tree, input, dataset, output;
    std::size_t timestep = 0;
    bool table = false;
  } recognize_;
  struct {
    std::string tree, input, dataset, output;
    std::size_t timestep = 0;
  } predict_;
  struct {
    std::string dataset, testset, duration = "work", output;
    SearchParams search;
  } optimize_;
  struct {
    std::string world, mode = "prediction", output, replay;
    std::vector<std::string> trees;
  } asr_;
  struct {
    std::string kind = "recognition", n = "3..6", l = "25", output;
    BenchParams params;
  } bench_;
  struct {
    std::string input, output;
  } report_;
};

}  // namespace

int main(int argc, char** argv) {
  try {
    return Cli().run(argc, argv);
  } catch (const std::exception& e) {
    return fail(1, "InternalError", e.what());
  }
}
