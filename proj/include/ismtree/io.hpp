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

#pragma once

#include "ismtree/harness.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace ismtree::io {

using nlohmann::json;

/// Every document carries "version": "1".
inline constexpr const char* kFormatVersion = "1";

json toJson(const Pose& pose);
Pose poseFromJson(const json& j);
json toJson(const ObjectId& id);
ObjectId objectIdFromJson(const json& j);

json toJson(const SingleIsm& ism);
SingleIsm singleIsmFromJson(const json& j);
json toJson(const IsmTree& tree);
IsmTree treeFromJson(const json& j);

json toJson(const DemonstrationDataset& dataset);
DemonstrationDataset datasetFromJson(const json& j);

json configurationToJson(std::span<const ObjectState> objects);
std::vector<ObjectState> configurationFromJson(const json& j);
json toJson(const TestSet& testSet);
TestSet testSetFromJson(const json& j);

json toJson(const RelationTopology& topology);
RelationTopology topologyFromJson(const json& j);

json toJson(const ScenarioSpec& spec);
ScenarioSpec scenarioFromJson(const json& j);

/// Recognition report: per instance, every result with its participants' compliances.
json reportToJson(const std::vector<SceneInstance>& instances, const IsmTree& tree);
/// Renders a report as a plain-text table (Simil. / Pos. / Orient. / Obj. Function).
std::string renderReportTable(const json& report);

json toJson(const PredictionCloud& cloud);
PredictionCloud cloudFromJson(const json& j);

/// World file: the simulated world plus the informed-search hints and optional search boxes.
struct WorldFile {
  SimWorld world;
  std::vector<Eigen::Vector3d> hints;
  std::vector<Box2d> boxes;
};
json toJson(const WorldFile& world);
WorldFile worldFromJson(const json& j);

/// Line-delimited JSON: one record per log entry, then one summary record.
std::string asrLogToJsonl(const AsrLog& log);
AsrLog asrLogFromJsonl(const std::string& text);

std::string benchToCsv(const std::vector<BenchRow>& rows);

/// Reads and parses a JSON file; throws FormatError on I/O, syntax or version problems.
json readJsonFile(const std::filesystem::path& path);
std::string readTextFile(const std::filesystem::path& path);
/// Throws FormatError when the file cannot be written.
void writeTextFile(const std::filesystem::path& path, const std::string& text);
/// Pretty-printed JSON with a trailing newline.
std::string dump(const json& j);

}  // namespace ismtree::io
