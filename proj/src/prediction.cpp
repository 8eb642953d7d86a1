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

#include "ismtree/prediction.hpp"

#include "ismtree/errors.hpp"

#include <algorithm>

namespace ismtree {

PathTable computeShortestPaths(const IsmTree& tree) {
  PathTable paths;
  std::vector<std::vector<std::string>> frontier{{tree.root}};
  while (!frontier.empty()) {
    std::sort(frontier.begin(), frontier.end(),
              [](const auto& a, const auto& b) { return a.back() < b.back(); });
    std::vector<std::vector<std::string>> next;
    for (const auto& chain : frontier) {
      const SingleIsm& ism = tree.ism(chain.back());
      for (const auto& [id, samples] : ism.voteTable) {
        if (!tree.isPlaceholder(id)) paths.try_emplace(id, IsmPath{id, chain});
      }
      for (const std::string& child : tree.children(chain.back())) {
        auto extended = chain;
        extended.push_back(child);
        next.push_back(std::move(extended));
      }
    }
    frontier = std::move(next);
  }
  return paths;
}

Pose predictPose(const ObjectId& target, const IsmPath& path, const IsmTree& tree,
                 const Pose& instancePose, const SampleSelector& select) {
  if (path.chain.empty()) throw DomainError("MissingVoteEntry", "empty ISM chain");
  Pose pose = instancePose;
  for (std::size_t hop = 0; hop < path.chain.size(); ++hop) {
    const SingleIsm& ism = tree.ism(path.chain[hop]);
    const ObjectId entry =
        hop + 1 < path.chain.size() ? placeholderIdFor(path.chain[hop + 1]) : target;
    const auto it = ism.voteTable.find(entry);
    if (it == ism.voteTable.end() || it->second.empty()) {
      throw DomainError("MissingVoteEntry", "ISM " + ism.label + " has no votes for " + entry.str());
    }
    const std::size_t index = select(ism.label, entry, it->second.size());
    pose = composePose(pose, it->second.at(index).backToObject);
  }
  return pose;
}

Pose predictPose(const ObjectId& target, const IsmPath& path, const IsmTree& tree,
                 const Pose& instancePose, std::mt19937_64& rng) {
  return predictPose(target, path, tree, instancePose,
                     [&rng](const std::string&, const ObjectId&, std::size_t count) {
                       return std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
                     });
}

PredictionCloud generateCloudOfPosePredictions(const SceneInstance& instance, const IsmTree& tree,
                                               const PathTable& paths,
                                               std::size_t samplesPerObject, std::mt19937_64& rng) {
  if (samplesPerObject == 0) {
    throw DomainError("InvalidParams", "at least one prediction per object is required");
  }
  std::set<ObjectId> found;
  for (const ObjectState& state : instance.realParticipants()) found.insert(state.id);

  PredictionCloud cloud;
  for (const auto& [id, path] : paths) {
    if (found.contains(id)) continue;
    std::vector<Pose>& poses = cloud[id];
    poses.reserve(samplesPerObject);
    for (std::size_t i = 0; i < samplesPerObject; ++i) {
      poses.push_back(predictPose(id, path, tree, instance.pose, rng));
    }
  }
  return cloud;
}

}  // namespace ismtree
