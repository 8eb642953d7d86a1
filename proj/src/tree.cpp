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

#include "ismtree/tree.hpp"

#include "ismtree/errors.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <unordered_map>

namespace ismtree {

int IsmTree::height() const {
  int h = 0;
  for (const auto& [label, level] : levelOf) h = std::max(h, level);
  return h;
}

const SingleIsm& IsmTree::ism(const std::string& label) const {
  const auto it = isms.find(label);
  if (it == isms.end()) throw DomainError("InvalidTree", "unknown ISM " + label);
  return it->second;
}

bool IsmTree::isPlaceholder(const ObjectId& id) const {
  return id.instanceLabel == "0" && isms.contains(id.classLabel) && id.classLabel != root;
}

std::set<ObjectId> IsmTree::realObjects() const {
  std::set<ObjectId> objects;
  for (const auto& [label, ism] : isms) {
    for (const auto& [id, samples] : ism.voteTable) {
      if (!isPlaceholder(id)) objects.insert(id);
    }
  }
  return objects;
}

std::vector<std::string> IsmTree::children(const std::string& label) const {
  std::vector<std::string> result;
  for (const auto& [child, link] : parentLink) {
    if (link.parent == label) result.push_back(child);
  }
  return result;
}

std::vector<std::string> IsmTree::evaluationOrder() const {
  std::vector<std::string> order;
  for (const auto& [label, ism] : isms) order.push_back(label);
  std::stable_sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
    return levelOf.at(a) > levelOf.at(b);
  });
  return order;
}

void IsmTree::validate() const {
  if (!isms.contains(root)) throw DomainError("InvalidTree", "root ISM " + root + " missing");
  if (parentLink.contains(root)) throw DomainError("InvalidTree", "root has a parent");
  for (const auto& [label, ism] : isms) {
    if (ism.label != label) throw DomainError("InvalidTree", "ISM key/label mismatch " + label);
    if (!levelOf.contains(label)) throw DomainError("InvalidTree", "no level for " + label);
    if (label == root) {
      if (levelOf.at(label) != 0) throw DomainError("InvalidTree", "root level must be 0");
      continue;
    }
    const auto link = parentLink.find(label);
    if (link == parentLink.end()) throw DomainError("InvalidTree", label + " has no parent");
    if (!isms.contains(link->second.parent)) {
      throw DomainError("InvalidTree", label + " links to unknown parent");
    }
    if (!isms.at(link->second.parent).voteTable.contains(link->second.placeholder)) {
      throw DomainError("InvalidTree", "parent of " + label + " has no entry for its placeholder");
    }
    if (levelOf.at(label) != levelOf.at(link->second.parent) + 1) {
      throw DomainError("InvalidTree", "level of " + label + " inconsistent with its parent");
    }
  }
}

IsmTree generateIsmTree(const std::string& categoryLabel, const StarPartition& partition,
                        const DemonstrationDataset& dataset) {
  if (partition.stars.empty()) throw DomainError("InvalidTopology", "no stars to learn from");
  dataset.validate();

  std::vector<StarTopology> stars = partition.stars;
  auto heightOf = [&](std::size_t i) { return partition.heights.at(stars[i].center); };

  std::vector<std::size_t> processOrder(stars.size());
  std::iota(processOrder.begin(), processOrder.end(), 0);
  std::stable_sort(processOrder.begin(), processOrder.end(), [&](std::size_t a, std::size_t b) {
    if (heightOf(a) != heightOf(b)) return heightOf(a) > heightOf(b);
    return a > b;
  });
  std::vector<std::size_t> attachOrder(processOrder.rbegin(), processOrder.rend());

  std::map<ObjectId, Trajectory> trajectories = dataset.trajectories;
  std::map<ObjectId, int> weights;
  std::vector<bool> processed(stars.size(), false);
  std::vector<std::string> labelOfStar(stars.size());
  std::map<std::string, std::size_t> parentStar;

  IsmTree tree;
  tree.categoryLabel = categoryLabel;
  int subIndex = static_cast<int>(stars.size()) - 2;
  for (std::size_t step = 0; step < processOrder.size(); ++step) {
    const std::size_t k = processOrder[step];
    const bool last = step + 1 == processOrder.size();
    const std::string label =
        last ? categoryLabel : categoryLabel + "_sub" + std::to_string(subIndex--);
    labelOfStar[k] = label;
    processed[k] = true;

    const StarTopology& star = stars[k];
    auto lookup = [&](const ObjectId& id) -> const Trajectory& {
      const auto it = trajectories.find(id);
      if (it == trajectories.end()) {
        throw DomainError("InvalidTopology", "object " + id.str() + " is not in the dataset");
      }
      return it->second;
    };
    std::vector<Trajectory> neighbors;
    for (const ObjectId& id : star.neighborhood) neighbors.push_back(lookup(id));
    LearnedIsm learned = learnSingleIsm(label, lookup(star.center), neighbors, weights);

    if (!last) {
      bool attached = false;
      for (std::size_t j : attachOrder) {
        if (processed[j]) continue;
        auto& hood = stars[j].neighborhood;
        const auto it = std::find(hood.begin(), hood.end(), star.center);
        if (it == hood.end()) continue;
        hood.erase(it);
        hood.insert(std::lower_bound(hood.begin(), hood.end(), learned.ism.referenceId),
                    learned.ism.referenceId);
        trajectories[learned.ism.referenceId] = learned.referenceTrajectory;
        weights[learned.ism.referenceId] = learned.ism.totalWeight();
        parentStar[label] = j;
        attached = true;
        break;
      }
      if (!attached) {
        throw DomainError("NoAttachmentPoint",
                          "star centered at " + star.center.str() + " shares no object");
      }
    } else {
      tree.root = label;
    }
    tree.isms.emplace(label, std::move(learned.ism));
  }

  for (const auto& [label, star] : parentStar) {
    tree.parentLink[label] = ParentLink{labelOfStar[star], placeholderIdFor(label)};
  }
  std::function<int(const std::string&)> levelFor = [&](const std::string& label) {
    if (label == tree.root) return 0;
    return levelFor(tree.parentLink.at(label).parent) + 1;
  };
  for (const auto& [label, ism] : tree.isms) tree.levelOf[label] = levelFor(label);
  tree.validate();
  return tree;
}

IsmTree learnIsmTree(const DemonstrationDataset& dataset, const RelationTopology& topology) {
  const auto objects = dataset.objects();
  if (std::set<ObjectId>(objects.begin(), objects.end()) != topology.objects()) {
    throw DomainError("InvalidTopology", "topology objects differ from the dataset's objects");
  }
  return generateIsmTree(dataset.categoryLabel, partitionIntoStars(topology), dataset);
}

std::vector<RecognitionResult> evaluateIsmsInTree(std::span<const ObjectState> inputs,
                                                  const IsmTree& tree,
                                                  const RecognitionParams& params,
                                                  RecognitionStats* stats) {
  params.validate();
  std::vector<ObjectState> states(inputs.begin(), inputs.end());
  std::vector<RecognitionResult> all;
  ResultTokenSource tokens;
  for (const std::string& label : tree.evaluationOrder()) {
    const SingleIsm& ism = tree.ism(label);
    std::vector<RecognitionResult> results =
        recognizeSingleIsm(states, ism, params, tokens, stats);
    if (label != tree.root) {
      std::size_t passed = 0;
      for (const RecognitionResult& result : results) {
        if (passed == params.maxResultsPassedUp) break;
        if (!meetsThreshold(result.confidence, params.resultKeepThreshold)) continue;
        states.push_back(ObjectState{ism.referenceId, result.referencePose, true,
                                     result.confidence, result.token});
        ++passed;
      }
    }
    for (RecognitionResult& result : results) all.push_back(std::move(result));
  }
  return all;
}

std::vector<ObjectState> SceneInstance::realParticipants() const {
  std::map<ObjectId, ObjectState> found;
  auto collect = [&](const RecognitionResult& result) {
    for (const Participant& p : result.participants) {
      if (!p.state.isPlaceholder) found.try_emplace(p.state.id, p.state);
    }
  };
  collect(rootResult);
  for (const RecognitionResult& sub : subResults) collect(sub);
  std::vector<ObjectState> states;
  for (auto& [id, state] : found) states.push_back(std::move(state));
  return states;
}

std::vector<SceneInstance> assembleInstances(const std::vector<RecognitionResult>& allResults,
                                             const IsmTree& tree, double assemblyThreshold) {
  std::unordered_map<std::uint64_t, const RecognitionResult*> byToken;
  for (const RecognitionResult& result : allResults) byToken[result.token.value] = &result;

  std::vector<SceneInstance> instances;
  for (const RecognitionResult& result : allResults) {
    if (result.ismLabel != tree.root || !meetsThreshold(result.confidence, assemblyThreshold)) {
      continue;
    }
    SceneInstance instance;
    instance.categoryLabel = tree.categoryLabel;
    instance.rootResult = result;
    instance.pose = result.referencePose;
    instance.confidence = result.confidence;
    std::function<void(const RecognitionResult&)> findSubInstances =
        [&](const RecognitionResult& parent) {
          for (const Participant& p : parent.participants) {
            if (!p.state.token) continue;
            const auto it = byToken.find(p.state.token.value);
            if (it == byToken.end()) continue;
            instance.subResults.push_back(*it->second);
            findSubInstances(*it->second);
          }
        };
    findSubInstances(result);
    instances.push_back(std::move(instance));
  }
  return instances;
}

std::vector<SceneInstance> recognizeScene(std::span<const ObjectState> inputs, const IsmTree& tree,
                                          const RecognitionParams& params,
                                          RecognitionStats* stats) {
  return assembleInstances(evaluateIsmsInTree(inputs, tree, params, stats), tree,
                           params.assemblyThreshold);
}

}  // namespace ismtree
