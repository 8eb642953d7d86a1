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

#include "ismtree/tree.hpp"

#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace ismtree {

/// ISM chain from the root down to an ISM holding `target` as a real input.
struct IsmPath {
  ObjectId target;
  std::vector<std::string> chain;

  bool operator==(const IsmPath&) const = default;
};

using PathTable = std::map<ObjectId, IsmPath>;

/// Breadth-first from the root. Shallowest occurrence wins; ties go to the smallest ISM label.
PathTable computeShortestPaths(const IsmTree& tree);

/// Picks the sample index used for one hop: (ISM label, vote-table entry, sample count).
using SampleSelector =
    std::function<std::size_t(const std::string& ism, const ObjectId& entry, std::size_t count)>;

/// Instance pose composed with one backToObject sample per hop. Throws DomainError("MissingVoteEntry").
Pose predictPose(const ObjectId& target, const IsmPath& path, const IsmTree& tree,
                 const Pose& instancePose, const SampleSelector& select);
/// Uniform, independent sampling per hop.
Pose predictPose(const ObjectId& target, const IsmPath& path, const IsmTree& tree,
                 const Pose& instancePose, std::mt19937_64& rng);

using PredictionCloud = std::map<ObjectId, std::vector<Pose>>;

/// `samplesPerObject` predicted poses for every category object the instance lacks.
PredictionCloud generateCloudOfPosePredictions(const SceneInstance& instance, const IsmTree& tree,
                                               const PathTable& paths,
                                               std::size_t samplesPerObject, std::mt19937_64& rng);

}  // namespace ismtree
