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

#include "ismtree/ism_core.hpp"
#include "ismtree/topology.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace ismtree {

struct ParentLink {
  std::string parent;
  ObjectId placeholder;  // identity of the child's reference object inside the parent

  bool operator==(const ParentLink&) const = default;
};

/// Hierarchy of ISMs linked through placeholder reference objects; the root has level 0.
struct IsmTree {
  std::string categoryLabel;
  std::map<std::string, SingleIsm> isms;
  std::string root;
  std::map<std::string, ParentLink> parentLink;
  std::map<std::string, int> levelOf;

  int height() const;
  const SingleIsm& ism(const std::string& label) const;
  bool isPlaceholder(const ObjectId& id) const;
  /// Real objects appearing anywhere in the tree.
  std::set<ObjectId> realObjects() const;
  std::vector<std::string> children(const std::string& label) const;
  /// Deepest level first, labels ascending within a level.
  std::vector<std::string> evaluationOrder() const;
  /// Throws DomainError("InvalidTree") on broken links or levels.
  void validate() const;
};

/// Turns a star partition into a tree: stars are learned deepest-height first, each new ISM
/// replacing its center object in the lowest-height remaining star that contains it.
/// Throws DomainError("NoAttachmentPoint") when a star shares no object with the rest.
IsmTree generateIsmTree(const std::string& categoryLabel, const StarPartition& partition,
                        const DemonstrationDataset& dataset);

/// partitionIntoStars + generateIsmTree.
IsmTree learnIsmTree(const DemonstrationDataset& dataset, const RelationTopology& topology);

/// Runs every ISM once, deepest level first. Kept results of non-root ISMs are fed upward
/// as placeholder states carrying the result pose, confidence and token.
std::vector<RecognitionResult> evaluateIsmsInTree(std::span<const ObjectState> inputs,
                                                  const IsmTree& tree,
                                                  const RecognitionParams& params,
                                                  RecognitionStats* stats = nullptr);

struct SceneInstance {
  std::string categoryLabel;
  RecognitionResult rootResult;
  std::vector<RecognitionResult> subResults;  // depth-first from the root
  Pose pose;
  double confidence = 0;

  /// Real objects found in this instance, one state per ObjectId.
  std::vector<ObjectState> realParticipants() const;
};

std::vector<SceneInstance> assembleInstances(const std::vector<RecognitionResult>& allResults,
                                             const IsmTree& tree, double assemblyThreshold);

std::vector<SceneInstance> recognizeScene(std::span<const ObjectState> inputs, const IsmTree& tree,
                                          const RecognitionParams& params,
                                          RecognitionStats* stats = nullptr);

}  // namespace ismtree
