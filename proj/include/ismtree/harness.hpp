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

#include "ismtree/prediction.hpp"
#include "ismtree/topology.hpp"
#include "ismtree/tree.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ismtree {

// ---------------------------------------------------------------------------
// Synthetic demonstrations

enum class MotionModel { Static, Jitter, RigidGroups };

struct ScenarioSpec {
  std::string categoryLabel = "scene";
  std::size_t objectCount = 3;
  std::size_t length = 10;
  MotionModel motion = MotionModel::Static;
  double jitterPosition = 0;        // sigma, m
  double jitterOrientationDeg = 0;  // sigma, degrees
  /// Object indices moving together. Members are laid out along the group's sweep
  /// direction, `groupSpacing` apart, with a common orientation.
  std::vector<std::vector<std::size_t>> rigidGroups;
  double groupSpacing = 0.2;  // m
  double groupTravel = 0.6;   // m, total sweep over the demonstration
  double workspace = 1.0;     // objects start inside [-workspace, workspace]^2
  std::uint64_t seed = 0;

  /// Throws DomainError("InvalidScenario").
  void validate() const;
};

/// Ids are ("Object<i>", "0"), i zero-padded to two digits so they sort numerically.
ObjectId scenarioObjectId(std::size_t index);

DemonstrationDataset generateDemonstration(const ScenarioSpec& spec);

// ---------------------------------------------------------------------------
// Perturbed test sets and the topology goodness measures

enum class PerturbationKind { Swap, Shift, Rotate, Mixed };

struct LabeledConfiguration {
  std::vector<ObjectState> objects;
  bool valid = true;
  std::string description;
};

using TestSet = std::vector<LabeledConfiguration>;

/// Swaps exchange two objects' poses at a demonstrated timestep; shifts and rotations
/// displace one object by `magnitude` (m or degrees) and are invalid iff that reaches the
/// tolerance. Mixed sets are half jittered demonstrations (valid) and half swaps or
/// over-tolerance shifts (invalid).
TestSet generatePerturbedTestSet(const DemonstrationDataset& dataset, PerturbationKind kind,
                                 double magnitude, std::size_t count, std::uint64_t seed,
                                 const RecognitionParams& tolerances = {});

/// Percentage of invalid configurations recognized with b >= assemblyThreshold.
/// Throws DomainError("EmptyTestSet") when the set holds no invalid configuration.
double numFPs(const IsmTree& tree, const TestSet& testSet, const RecognitionParams& params);

/// Mean wall-clock seconds of recognizeScene per configuration, after 2 warm-up runs.
double avgDur(const IsmTree& tree, const TestSet& testSet, const RecognitionParams& params);

/// Mean recognition work (vote evaluations plus candidates) per configuration; deterministic.
double avgWork(const IsmTree& tree, const TestSet& testSet, const RecognitionParams& params);

// ---------------------------------------------------------------------------
// Relation topology selection

enum class DurationMeasure { WorkUnits, WallClock };

struct SearchParams {
  std::size_t iterationBudget = 50;  // accepted moves
  double fpWeight = 1.0;             // lambda_fp, per percent
  DurationMeasure duration = DurationMeasure::WorkUnits;
  double secondsPerWorkUnit = 1e-8;  // converts work units into nominal seconds
  std::optional<ObjectId> startCenter;
  RecognitionParams recognition;
};

struct TopologyScore {
  double numFPs = 0;
  double avgDur = 0;
  double score = 0;
};

TopologyScore scoreTopology(const DemonstrationDataset& dataset, const RelationTopology& topology,
                            const TestSet& testSet, const SearchParams& params);

/// First-improvement hill climbing from a star over {add, remove, swap one relation}.
/// Throws DomainError("BudgetZero").
RelationTopology selectTopology(const DemonstrationDataset& dataset, const TestSet& testSet,
                                const SearchParams& params);

// ---------------------------------------------------------------------------
// Brute-force oracle

struct OracleMatch {
  ObjectId id;
  std::size_t input = 0;
  int timestep = 0;  // 1-based
  double similarity = 0;
};

struct OracleResult {
  double objectiveValue = 0;
  Eigen::Matrix4d referencePose = Eigen::Matrix4d::Identity();
  std::vector<OracleMatch> assignment;
};

/// Exhaustive evaluation of every voted reference pose against every object's every
/// relative pose, computed straight from the dataset with 4x4 matrices. `topology` must be
/// a star. Throws DomainError("TooLargeForOracle") for more than 4 objects or 10 timesteps.
OracleResult bruteForceRecognitionOracle(std::span<const ObjectState> inputs,
                                         const DemonstrationDataset& dataset,
                                         const RelationTopology& topology,
                                         const RecognitionParams& params);

// ---------------------------------------------------------------------------
// Benchmarks

struct BenchRow {
  std::size_t n = 0;
  std::size_t l = 0;
  double meanSeconds = 0;
  double stdSeconds = 0;
};

struct BenchParams {
  std::size_t repetitions = 3;
  std::uint64_t seed = 0;
  double jitterPosition = 0.01;
  double jitterOrientationDeg = 2;
  RecognitionParams recognition;
};

/// One row per (n, l) cell: recognition of a jittered demonstration with a star tree.
std::vector<BenchRow> benchRecognition(const std::vector<std::pair<std::size_t, std::size_t>>& grid,
                                       const BenchParams& params);
/// Same cells; times predicting `samplesPerObject` poses for every object of the category.
std::vector<BenchRow> benchPrediction(const std::vector<std::pair<std::size_t, std::size_t>>& grid,
                                      std::size_t samplesPerObject, const BenchParams& params);

/// Coefficient of determination of the least-squares line through (x, y).
double linearFitR2(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Active scene recognition simulation

struct CameraModel {
  double fovDeg = 60;
  double minRange = 0.3;
  double maxRange = 2.5;
};

struct View {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double yaw = 0;  // radians

  bool operator==(const View&) const = default;
};

struct Box2d {
  Eigen::Vector2d min = Eigen::Vector2d::Zero();
  Eigen::Vector2d max = Eigen::Vector2d::Zero();
};

struct SimWorld {
  std::vector<ObjectState> objects;
  std::vector<ObjectState> clutter;
  View robot;
  CameraModel camera;
  double noisePosition = 0.005;  // m
  double noiseOrientationDeg = 1;
  Box2d workspace{Eigen::Vector2d(-3, -3), Eigen::Vector2d(3, 3)};

  /// Throws DomainError("InvalidWorld").
  void validate() const;
};

bool inFrustum(const View& view, const CameraModel& camera, const Eigen::Vector3d& point);

enum class AsrState { DirectSearch, SceneRecognition, ObjectPosePrediction, RelationBasedSearch };

std::string toString(AsrState state);
AsrState asrStateFromString(const std::string& text);

struct AsrParams {
  RecognitionParams recognition{0.1, 0.1, 30, 0.1, 0.1, 32};
  std::size_t predictionsPerObject = 100;
  std::vector<Eigen::Vector3d> hints;  // prior object locations for the informed direct search
  double sweepStep = 1.0;              // m
  std::size_t sweepYaws = 8;
  std::vector<double> viewRadii{1.0, 1.5, 2.0};
  std::size_t viewAngles = 12;
  double travelWeight = 0.05;  // utility per unit of travel cost
  double turnWeight = 0.5;     // travel cost per radian of turning
  std::size_t noProgressLimit = 3;
  bool usePrediction = true;
  std::vector<Box2d> searchBoxes;  // bounding-box baseline (used with usePrediction = false)
  double boxSampleStep = 0.25;
  std::uint64_t seed = 0;
};

struct AsrLogEntry {
  AsrState state = AsrState::DirectSearch;
  std::optional<View> view;
  std::vector<ObjectId> detected;  // newly detected
  double cost = 0;                 // accumulated travel cost
  std::string note;
};

struct AsrInstanceSummary {
  std::string categoryLabel;
  double confidence = 0;
  Pose pose;
  std::vector<ObjectId> objects;
};

struct AsrLog {
  std::vector<AsrLogEntry> entries;
  std::vector<AsrInstanceSummary> instances;
  std::size_t adoptedViews = 0;
  std::size_t viewCap = 0;
  double totalCost = 0;
  std::vector<ObjectId> found;  // category objects found, sorted
  bool allFound = false;
};

AsrLog runAsrSimulation(const SimWorld& world, const std::vector<IsmTree>& trees,
                        const AsrParams& params);

}  // namespace ismtree
