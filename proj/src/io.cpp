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

#include "ismtree/io.hpp"

#include "ismtree/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ismtree::io {

namespace {

template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed ") + what + ": " + e.what());
  }
}

void checkVersion(const json& j, const char* what) {
  if (!j.is_object()) throw FormatError(std::string(what) + " must be a JSON object");
  const auto it = j.find("version");
  if (it == j.end() || !it->is_string() || it->get<std::string>() != kFormatVersion) {
    throw FormatError(std::string(what) + " needs \"version\": \"1\"");
  }
}

json versioned() { return json{{"version", kFormatVersion}}; }

std::string fixed(double value, int digits = 2) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
  return buffer;
}

json stateToJson(const ObjectState& state) {
  json j{{"object", toJson(state.id)}, {"pose", toJson(state.pose)}};
  if (state.confidence != 1.0) j["confidence"] = state.confidence;
  return j;
}

ObjectState stateFromJson(const json& j) {
  ObjectState state;
  state.id = objectIdFromJson(j.at("object"));
  state.pose = poseFromJson(j.at("pose"));
  state.confidence = j.value("confidence", 1.0);
  if (!(state.confidence >= 0 && state.confidence <= 1)) {
    throw FormatError("confidence of " + state.id.str() + " outside [0, 1]");
  }
  return state;
}

json viewToJson(const View& view) {
  return json{{"x", view.position.x()}, {"y", view.position.y()}, {"yaw", view.yaw}};
}

View viewFromJson(const json& j) {
  return View{Eigen::Vector2d(j.at("x").get<double>(), j.at("y").get<double>()),
              j.at("yaw").get<double>()};
}

json boxToJson(const Box2d& box) {
  return json{{"min", {box.min.x(), box.min.y()}}, {"max", {box.max.x(), box.max.y()}}};
}

Box2d boxFromJson(const json& j) {
  const auto lo = j.at("min").get<std::array<double, 2>>();
  const auto hi = j.at("max").get<std::array<double, 2>>();
  return Box2d{Eigen::Vector2d(lo[0], lo[1]), Eigen::Vector2d(hi[0], hi[1])};
}

}  // namespace

json toJson(const Pose& pose) { return pose.toArray(); }

Pose poseFromJson(const json& j) {
  return guarded("pose", [&] {
    if (!j.is_array() || j.size() != 7) throw FormatError("a pose needs 7 numbers");
    const auto values = j.get<std::array<double, 7>>();
    const Eigen::Quaterniond q(values[3], values[4], values[5], values[6]);
    if (q.norm() < 1e-6) throw FormatError("pose quaternion has zero norm");
    return Pose::fromArray(values);
  });
}

json toJson(const ObjectId& id) {
  return json{{"class", id.classLabel}, {"instance", id.instanceLabel}};
}

ObjectId objectIdFromJson(const json& j) {
  return guarded("object id", [&] {
    if (j.is_string()) return ObjectId::parse(j.get<std::string>());
    return ObjectId{j.at("class").get<std::string>(), j.at("instance").get<std::string>()};
  });
}

json toJson(const SingleIsm& ism) {
  json votes = json::array();
  for (const auto& [id, samples] : ism.voteTable) {
    for (const RelativePoseSample& s : samples) {
      votes.push_back(json{{"object", toJson(id)},
                           {"timestep", s.timestep},
                           {"voteToReference", toJson(s.voteToReference)},
                           {"backToObject", toJson(s.backToObject)}});
    }
  }
  json weights = json::array();
  for (const auto& [id, weight] : ism.weightTable) {
    weights.push_back(json{{"object", toJson(id)}, {"weight", weight}});
  }
  return json{{"label", ism.label},
              {"reference", toJson(ism.referenceId)},
              {"votes", votes},
              {"weights", weights}};
}

SingleIsm singleIsmFromJson(const json& j) {
  return guarded("ISM", [&] {
    SingleIsm ism;
    ism.label = j.at("label").get<std::string>();
    ism.referenceId = objectIdFromJson(j.at("reference"));
    for (const json& vote : j.at("votes")) {
      RelativePoseSample sample;
      sample.timestep = vote.at("timestep").get<int>();
      sample.voteToReference = poseFromJson(vote.at("voteToReference"));
      sample.backToObject = vote.contains("backToObject")
                                ? poseFromJson(vote.at("backToObject"))
                                : invertPose(sample.voteToReference);
      ism.voteTable[objectIdFromJson(vote.at("object"))].push_back(sample);
    }
    for (const json& w : j.at("weights")) {
      const int weight = w.at("weight").get<int>();
      if (weight <= 0) throw FormatError("weights must be positive");
      ism.weightTable[objectIdFromJson(w.at("object"))] = weight;
    }
    for (const auto& [id, samples] : ism.voteTable) {
      if (!ism.weightTable.contains(id)) throw FormatError("missing weight for " + id.str());
    }
    return ism;
  });
}

json toJson(const IsmTree& tree) {
  json j = versioned();
  j["category"] = tree.categoryLabel;
  j["root"] = tree.root;
  json isms = json::array();
  for (const auto& [label, ism] : tree.isms) isms.push_back(toJson(ism));
  j["isms"] = isms;
  json parents = json::array();
  for (const auto& [child, link] : tree.parentLink) {
    parents.push_back(
        json{{"child", child}, {"parent", link.parent}, {"placeholder", toJson(link.placeholder)}});
  }
  j["parents"] = parents;
  json levels = json::object();
  for (const auto& [label, level] : tree.levelOf) levels[label] = level;
  j["levels"] = levels;
  return j;
}

IsmTree treeFromJson(const json& j) {
  checkVersion(j, "tree");
  IsmTree tree = guarded("tree", [&] {
    IsmTree t;
    t.categoryLabel = j.at("category").get<std::string>();
    t.root = j.at("root").get<std::string>();
    for (const json& ism : j.at("isms")) {
      SingleIsm parsed = singleIsmFromJson(ism);
      const std::string label = parsed.label;
      t.isms.emplace(label, std::move(parsed));
    }
    for (const json& link : j.at("parents")) {
      t.parentLink[link.at("child").get<std::string>()] =
          ParentLink{link.at("parent").get<std::string>(), objectIdFromJson(link.at("placeholder"))};
    }
    for (const auto& [label, level] : j.at("levels").items()) t.levelOf[label] = level.get<int>();
    return t;
  });
  try {
    tree.validate();
  } catch (const DomainError& e) {
    throw FormatError(std::string("inconsistent tree: ") + e.what());
  }
  return tree;
}

json toJson(const DemonstrationDataset& dataset) {
  json j = versioned();
  j["category"] = dataset.categoryLabel;
  json trajectories = json::array();
  for (const auto& [id, trajectory] : dataset.trajectories) {
    json poses = json::array();
    for (const Pose& pose : trajectory.poses) poses.push_back(toJson(pose));
    trajectories.push_back(json{{"object", toJson(id)}, {"poses", poses}});
  }
  j["trajectories"] = trajectories;
  return j;
}

DemonstrationDataset datasetFromJson(const json& j) {
  checkVersion(j, "dataset");
  return guarded("dataset", [&] {
    DemonstrationDataset dataset;
    dataset.categoryLabel = j.at("category").get<std::string>();
    for (const json& t : j.at("trajectories")) {
      Trajectory trajectory{objectIdFromJson(t.at("object")), {}};
      for (const json& pose : t.at("poses")) trajectory.poses.push_back(poseFromJson(pose));
      if (dataset.trajectories.contains(trajectory.objectId)) {
        throw FormatError("duplicate trajectory for " + trajectory.objectId.str());
      }
      dataset.trajectories.emplace(trajectory.objectId, std::move(trajectory));
    }
    return dataset;
  });
}

json configurationToJson(std::span<const ObjectState> objects) {
  json j = versioned();
  json list = json::array();
  for (const ObjectState& state : objects) list.push_back(stateToJson(state));
  j["objects"] = list;
  return j;
}

std::vector<ObjectState> configurationFromJson(const json& j) {
  checkVersion(j, "configuration");
  return guarded("configuration", [&] {
    std::vector<ObjectState> states;
    for (const json& s : j.at("objects")) states.push_back(stateFromJson(s));
    return states;
  });
}

json toJson(const TestSet& testSet) {
  json j = versioned();
  json list = json::array();
  for (const LabeledConfiguration& c : testSet) {
    json objects = json::array();
    for (const ObjectState& state : c.objects) objects.push_back(stateToJson(state));
    list.push_back(json{{"valid", c.valid}, {"description", c.description}, {"objects", objects}});
  }
  j["configurations"] = list;
  return j;
}

TestSet testSetFromJson(const json& j) {
  checkVersion(j, "test set");
  return guarded("test set", [&] {
    TestSet set;
    for (const json& c : j.at("configurations")) {
      LabeledConfiguration configuration;
      configuration.valid = c.at("valid").get<bool>();
      configuration.description = c.value("description", "");
      for (const json& s : c.at("objects")) configuration.objects.push_back(stateFromJson(s));
      set.push_back(std::move(configuration));
    }
    return set;
  });
}

json toJson(const RelationTopology& topology) {
  json j = versioned();
  json objects = json::array();
  for (const ObjectId& id : topology.objects()) objects.push_back(toJson(id));
  j["objects"] = objects;
  json relations = json::array();
  for (const auto& [a, b] : topology.relations()) relations.push_back({toJson(a), toJson(b)});
  j["relations"] = relations;
  return j;
}

RelationTopology topologyFromJson(const json& j) {
  checkVersion(j, "topology");
  return guarded("topology", [&] {
    RelationTopology topology;
    for (const json& id : j.at("objects")) topology.addObject(objectIdFromJson(id));
    for (const json& r : j.at("relations")) {
      if (!r.is_array() || r.size() != 2) throw FormatError("a relation needs two objects");
      try {
        topology.addRelation(objectIdFromJson(r[0]), objectIdFromJson(r[1]));
      } catch (const DomainError& e) {
        throw FormatError(e.what());
      }
    }
    return topology;
  });
}

json toJson(const ScenarioSpec& spec) {
  json j = versioned();
  j["category"] = spec.categoryLabel;
  j["objects"] = spec.objectCount;
  j["length"] = spec.length;
  j["motion"] = spec.motion == MotionModel::Static   ? "static"
                : spec.motion == MotionModel::Jitter ? "jitter"
                                                     : "rigid-groups";
  j["jitter"] = json{{"position", spec.jitterPosition},
                     {"orientationDeg", spec.jitterOrientationDeg}};
  j["groups"] = spec.rigidGroups;
  j["groupSpacing"] = spec.groupSpacing;
  j["groupTravel"] = spec.groupTravel;
  j["workspace"] = spec.workspace;
  j["seed"] = spec.seed;
  return j;
}

ScenarioSpec scenarioFromJson(const json& j) {
  checkVersion(j, "scenario");
  return guarded("scenario", [&] {
    ScenarioSpec spec;
    spec.categoryLabel = j.value("category", spec.categoryLabel);
    spec.objectCount = j.at("objects").get<std::size_t>();
    spec.length = j.at("length").get<std::size_t>();
    const std::string motion = j.value("motion", std::string("static"));
    if (motion == "static") {
      spec.motion = MotionModel::Static;
    } else if (motion == "jitter") {
      spec.motion = MotionModel::Jitter;
    } else if (motion == "rigid-groups") {
      spec.motion = MotionModel::RigidGroups;
    } else {
      throw FormatError("unknown motion model " + motion);
    }
    if (j.contains("jitter")) {
      spec.jitterPosition = j["jitter"].value("position", 0.0);
      spec.jitterOrientationDeg = j["jitter"].value("orientationDeg", 0.0);
    }
    if (j.contains("groups")) {
      spec.rigidGroups = j["groups"].get<std::vector<std::vector<std::size_t>>>();
    }
    spec.groupSpacing = j.value("groupSpacing", spec.groupSpacing);
    spec.groupTravel = j.value("groupTravel", spec.groupTravel);
    spec.workspace = j.value("workspace", spec.workspace);
    spec.seed = j.value("seed", spec.seed);
    return spec;
  });
}

json reportToJson(const std::vector<SceneInstance>& instances, const IsmTree& tree) {
  auto resultJson = [&](const RecognitionResult& result) {
    json participants = json::array();
    for (const Participant& p : result.participants) {
      participants.push_back(json{{"object", toJson(p.state.id)},
                                  {"placeholder", p.state.isPlaceholder},
                                  {"similarity", p.similarity},
                                  {"positionCompliance", p.positionCompliance},
                                  {"orientationCompliance", p.orientationCompliance},
                                  {"weight", p.weight},
                                  {"confidence", p.state.confidence},
                                  {"contribution", p.contribution},
                                  {"timestep", p.timestep}});
    }
    const auto ism = tree.isms.find(result.ismLabel);
    return json{{"ism", result.ismLabel},
                {"token", result.token.value},
                {"objective", result.objectiveValue},
                {"maxObjective", ism == tree.isms.end() ? 0 : ism->second.totalWeight()},
                {"confidence", result.confidence},
                {"pose", toJson(result.referencePose)},
                {"participants", participants}};
  };
  json j = versioned();
  j["category"] = tree.categoryLabel;
  json list = json::array();
  for (const SceneInstance& instance : instances) {
    json results = json::array({resultJson(instance.rootResult)});
    for (const RecognitionResult& sub : instance.subResults) results.push_back(resultJson(sub));
    list.push_back(
        json{{"confidence", instance.confidence}, {"pose", toJson(instance.pose)}, {"results", results}});
  }
  j["instances"] = list;
  return j;
}

std::string renderReportTable(const json& report) {
  checkVersion(report, "report");
  return guarded("report", [&] {
    std::ostringstream out;
    const auto& instances = report.at("instances");
    out << "Category " << report.at("category").get<std::string>() << ": " << instances.size()
        << " instance(s)\n";
    std::size_t index = 0;
    for (const json& instance : instances) {
      out << "\nInstance " << ++index << "  confidence "
          << fixed(instance.at("confidence").get<double>()) << "\n";
      for (const json& result : instance.at("results")) {
        out << "\n  ISM " << result.at("ism").get<std::string>() << "  (confidence "
            << fixed(result.at("confidence").get<double>()) << ")\n";
        char line[160];
        std::snprintf(line, sizeof line, "  %-32s %8s %8s %8s\n", "Object", "Simil.", "Pos.",
                      "Orient.");
        out << line;
        for (const json& p : result.at("participants")) {
          const ObjectId id = objectIdFromJson(p.at("object"));
          std::snprintf(line, sizeof line, "  %-32s %8s %8s %8s\n", id.str().c_str(),
                        fixed(p.at("contribution").get<double>()).c_str(),
                        fixed(p.at("positionCompliance").get<double>()).c_str(),
                        fixed(p.at("orientationCompliance").get<double>()).c_str());
          out << line;
        }
        std::snprintf(line, sizeof line, "  %-32s %8s  (max %d)\n", "Obj. Function",
                      fixed(result.at("objective").get<double>()).c_str(),
                      result.at("maxObjective").get<int>());
        out << line;
      }
    }
    return out.str();
  });
}

json toJson(const PredictionCloud& cloud) {
  json j = versioned();
  json list = json::array();
  for (const auto& [id, poses] : cloud) {
    json p = json::array();
    for (const Pose& pose : poses) p.push_back(toJson(pose));
    list.push_back(json{{"object", toJson(id)}, {"poses", p}});
  }
  j["objects"] = list;
  return j;
}

PredictionCloud cloudFromJson(const json& j) {
  checkVersion(j, "cloud");
  return guarded("cloud", [&] {
    PredictionCloud cloud;
    for (const json& entry : j.at("objects")) {
      auto& poses = cloud[objectIdFromJson(entry.at("object"))];
      for (const json& pose : entry.at("poses")) poses.push_back(poseFromJson(pose));
    }
    return cloud;
  });
}

json toJson(const WorldFile& file) {
  const SimWorld& w = file.world;
  json j = versioned();
  json objects = json::array();
  for (const ObjectState& s : w.objects) objects.push_back(stateToJson(s));
  json clutter = json::array();
  for (const ObjectState& s : w.clutter) clutter.push_back(stateToJson(s));
  j["objects"] = objects;
  j["clutter"] = clutter;
  j["robot"] = viewToJson(w.robot);
  j["camera"] = json{{"fovDeg", w.camera.fovDeg},
                     {"minRange", w.camera.minRange},
                     {"maxRange", w.camera.maxRange}};
  j["noise"] = json{{"position", w.noisePosition}, {"orientationDeg", w.noiseOrientationDeg}};
  j["workspace"] = boxToJson(w.workspace);
  json hints = json::array();
  for (const Eigen::Vector3d& h : file.hints) hints.push_back({h.x(), h.y(), h.z()});
  j["hints"] = hints;
  json boxes = json::array();
  for (const Box2d& b : file.boxes) boxes.push_back(boxToJson(b));
  j["boxes"] = boxes;
  return j;
}

WorldFile worldFromJson(const json& j) {
  checkVersion(j, "world");
  return guarded("world", [&] {
    WorldFile file;
    SimWorld& w = file.world;
    for (const json& s : j.at("objects")) w.objects.push_back(stateFromJson(s));
    if (j.contains("clutter")) {
      for (const json& s : j["clutter"]) w.clutter.push_back(stateFromJson(s));
    }
    if (j.contains("robot")) w.robot = viewFromJson(j["robot"]);
    if (j.contains("camera")) {
      w.camera.fovDeg = j["camera"].value("fovDeg", w.camera.fovDeg);
      w.camera.minRange = j["camera"].value("minRange", w.camera.minRange);
      w.camera.maxRange = j["camera"].value("maxRange", w.camera.maxRange);
    }
    if (j.contains("noise")) {
      w.noisePosition = j["noise"].value("position", w.noisePosition);
      w.noiseOrientationDeg = j["noise"].value("orientationDeg", w.noiseOrientationDeg);
    }
    if (j.contains("workspace")) w.workspace = boxFromJson(j["workspace"]);
    if (j.contains("hints")) {
      for (const json& h : j["hints"]) {
        const auto v = h.get<std::array<double, 3>>();
        file.hints.emplace_back(v[0], v[1], v[2]);
      }
    }
    if (j.contains("boxes")) {
      for (const json& b : j["boxes"]) file.boxes.push_back(boxFromJson(b));
    }
    return file;
  });
}

std::string asrLogToJsonl(const AsrLog& log) {
  std::string text = json{{"type", "header"}, {"version", kFormatVersion}}.dump() + "\n";
  for (const AsrLogEntry& e : log.entries) {
    json detected = json::array();
    for (const ObjectId& id : e.detected) detected.push_back(toJson(id));
    json record{{"type", "entry"},
                {"state", toString(e.state)},
                {"view", e.view ? viewToJson(*e.view) : json(nullptr)},
                {"detected", detected},
                {"cost", e.cost},
                {"note", e.note}};
    text += record.dump() + "\n";
  }
  json found = json::array();
  for (const ObjectId& id : log.found) found.push_back(toJson(id));
  json instances = json::array();
  for (const AsrInstanceSummary& s : log.instances) {
    json objects = json::array();
    for (const ObjectId& id : s.objects) objects.push_back(toJson(id));
    instances.push_back(json{{"category", s.categoryLabel},
                             {"confidence", s.confidence},
                             {"pose", toJson(s.pose)},
                             {"objects", objects}});
  }
  json summary{{"type", "summary"},     {"adoptedViews", log.adoptedViews},
               {"viewCap", log.viewCap}, {"totalCost", log.totalCost},
               {"found", found},         {"allFound", log.allFound},
               {"instances", instances}};
  text += summary.dump() + "\n";
  return text;
}

AsrLog asrLogFromJsonl(const std::string& text) {
  return guarded("ASR log", [&] {
    AsrLog log;
    std::istringstream in(text);
    std::string line;
    bool header = false, summary = false;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json record = json::parse(line);
      const std::string type = record.at("type").get<std::string>();
      if (type == "header") {
        checkVersion(record, "ASR log");
        header = true;
      } else if (type == "entry") {
        AsrLogEntry e;
        try {
          e.state = asrStateFromString(record.at("state").get<std::string>());
        } catch (const DomainError& error) {
          throw FormatError(error.what());
        }
        if (!record.at("view").is_null()) e.view = viewFromJson(record["view"]);
        for (const json& id : record.at("detected")) e.detected.push_back(objectIdFromJson(id));
        e.cost = record.at("cost").get<double>();
        e.note = record.value("note", "");
        log.entries.push_back(std::move(e));
      } else if (type == "summary") {
        log.adoptedViews = record.at("adoptedViews").get<std::size_t>();
        log.viewCap = record.at("viewCap").get<std::size_t>();
        log.totalCost = record.at("totalCost").get<double>();
        log.allFound = record.at("allFound").get<bool>();
        for (const json& id : record.at("found")) log.found.push_back(objectIdFromJson(id));
        for (const json& s : record.at("instances")) {
          AsrInstanceSummary summaryEntry{s.at("category").get<std::string>(),
                                          s.at("confidence").get<double>(),
                                          poseFromJson(s.at("pose")),
                                          {}};
          for (const json& id : s.at("objects")) summaryEntry.objects.push_back(objectIdFromJson(id));
          log.instances.push_back(std::move(summaryEntry));
        }
        summary = true;
      } else {
        throw FormatError("unknown ASR log record type " + type);
      }
    }
    if (!header || !summary) throw FormatError("ASR log lacks its header or summary record");
    return log;
  });
}

std::string benchToCsv(const std::vector<BenchRow>& rows) {
  std::string text = "n,l,mean_s,std_s\n";
  char line[128];
  for (const BenchRow& row : rows) {
    std::snprintf(line, sizeof line, "%zu,%zu,%.9g,%.9g\n", row.n, row.l, row.meanSeconds,
                  row.stdSeconds);
    text += line;
  }
  return text;
}

std::string readTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json readJsonFile(const std::filesystem::path& path) {
  const std::string text = readTextFile(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void writeTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("failed writing " + path.string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace ismtree::io
