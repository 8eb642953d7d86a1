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

#include "ismtree/geometry.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace ismtree {

/// Object identity: class label plus instance label.
struct ObjectId {
  std::string classLabel;
  std::string instanceLabel;

  auto operator<=>(const ObjectId&) const = default;
  bool operator==(const ObjectId&) const = default;

  std::string str() const { return classLabel + "/" + instanceLabel; }
  static ObjectId parse(const std::string& text);
};

/// Opaque identifier of one recognition result. 0 means "no result" (real objects).
struct ResultToken {
  std::uint64_t value = 0;

  auto operator<=>(const ResultToken&) const = default;
  bool operator==(const ResultToken&) const = default;
  explicit operator bool() const { return value != 0; }
};

/// Monotonic token source; one per recognition call keeps tokens unique and deterministic.
class ResultTokenSource {
 public:
  ResultToken next() { return ResultToken{++last_}; }

 private:
  std::uint64_t last_ = 0;
};

struct ObjectState {
  ObjectId id;
  Pose pose;
  bool isPlaceholder = false;
  double confidence = 1.0;
  /// Set for placeholders: the token of the recognition result they stand for.
  ResultToken token;
};

struct Trajectory {
  ObjectId objectId;
  std::vector<Pose> poses;

  std::size_t length() const { return poses.size(); }
};

/// Per-object timed pose sequences of equal length, recorded for one scene category.
struct DemonstrationDataset {
  std::string categoryLabel;
  std::map<ObjectId, Trajectory> trajectories;

  std::size_t length() const;
  std::vector<ObjectId> objects() const;
  /// Configuration demonstrated at `timestep` (0-based).
  std::vector<ObjectState> configurationAt(std::size_t timestep) const;
  /// Throws DomainError on fewer than two objects, empty or unequal trajectories.
  void validate() const;
};

/// One observed relative pose between an object and its ISM's reference.
struct RelativePoseSample {
  int timestep = 0;     // 1-based, as in the demonstration
  Pose voteToReference;  // object -> reference
  Pose backToObject;     // reference -> object
};

/// A single ISM: for every input object the sequence of relative poses to the reference.
struct SingleIsm {
  std::string label;
  ObjectId referenceId;
  std::map<ObjectId, std::vector<RelativePoseSample>> voteTable;
  std::map<ObjectId, int> weightTable;

  int totalWeight() const;
  int weightOf(const ObjectId& id) const;
  std::size_t sampleCount() const;
};

struct LearnedIsm {
  SingleIsm ism;
  /// Trajectory of the ISM's reference object; it replaces the center in the parent ISM.
  Trajectory referenceTrajectory;
};

/// Identity of the reference (placeholder) object of the ISM labelled `ismLabel`.
inline ObjectId placeholderIdFor(const std::string& ismLabel) { return ObjectId{ismLabel, "0"}; }

/// Learns a star-shaped ISM. The center votes for itself with identity samples, every
/// neighbor with its relative pose to the center at each timestep. Neighbors default
/// to weight 1; pass `inputWeights` for placeholder inputs.
LearnedIsm learnSingleIsm(const std::string& label, const Trajectory& center,
                          std::span<const Trajectory> neighbors,
                          const std::map<ObjectId, int>& inputWeights = {});

struct RecognitionParams {
  double binSize = 0.1;                 // m
  double positionTolerance = 0.1;       // m
  double orientationToleranceDeg = 30;  // degrees
  double resultKeepThreshold = 0.5;
  double assemblyThreshold = 0.6;       // epsilon_R
  std::size_t maxResultsPassedUp = 32;

  /// Throws DomainError("InvalidParams") when out of range.
  void validate() const;
};

/// Confidence-versus-threshold test with a 1e-9 slack, so that confidences equal up to
/// rounding (e.g. before and after a rigid motion of the inputs) are kept or dropped alike.
inline bool meetsThreshold(double confidence, double threshold) {
  return confidence >= threshold - 1e-9;
}

/// max(0, 1 - deviation / tolerance)
double positionCompliance(const Eigen::Vector3d& expected, const Eigen::Vector3d& actual,
                          double tolerance);
double orientationCompliance(const Eigen::Quaterniond& expected, const Eigen::Quaterniond& actual,
                             double toleranceDeg);

struct Participant {
  ObjectState state;
  double similarity = 0;  // positionCompliance * orientationCompliance
  double positionCompliance = 0;
  double orientationCompliance = 0;
  double weight = 0;
  double contribution = 0;  // weight * state.confidence * similarity
  int timestep = 0;         // sample that matched best
};

struct RecognitionResult {
  std::string ismLabel;
  Pose referencePose;
  double objectiveValue = 0;
  double confidence = 0;
  std::vector<Participant> participants;  // sorted by (ObjectId, token)
  ResultToken token;
};

/// Work counters, used as a deterministic runtime proxy.
struct RecognitionStats {
  std::uint64_t candidates = 0;
  std::uint64_t voteEvaluations = 0;

  RecognitionStats& operator+=(const RecognitionStats& other) {
    candidates += other.candidates;
    voteEvaluations += other.voteEvaluations;
    return *this;
  }
};

/// Hough-style recognition with one ISM. Returns the non-dominated results sorted by
/// objective (descending); tokens are drawn from `tokens`.
std::vector<RecognitionResult> recognizeSingleIsm(std::span<const ObjectState> inputs,
                                                  const SingleIsm& ism,
                                                  const RecognitionParams& params,
                                                  ResultTokenSource& tokens,
                                                  RecognitionStats* stats = nullptr);

std::vector<RecognitionResult> recognizeSingleIsm(std::span<const ObjectState> inputs,
                                                  const SingleIsm& ism,
                                                  const RecognitionParams& params);

}  // namespace ismtree

template <>
struct std::hash<ismtree::ObjectId> {
  std::size_t operator()(const ismtree::ObjectId& id) const noexcept {
    const std::size_t a = std::hash<std::string>{}(id.classLabel);
    const std::size_t b = std::hash<std::string>{}(id.instanceLabel);
    return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  }
};
