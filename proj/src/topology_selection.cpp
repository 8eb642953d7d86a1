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

#include "ismtree/errors.hpp"
#include "ismtree/harness.hpp"

#include <map>

namespace ismtree {

TopologyScore scoreTopology(const DemonstrationDataset& dataset, const RelationTopology& topology,
                            const TestSet& testSet, const SearchParams& params) {
  const IsmTree tree = learnIsmTree(dataset, topology);
  TopologyScore score;
  score.numFPs = numFPs(tree, testSet, params.recognition);
  score.avgDur = params.duration == DurationMeasure::WallClock
                     ? avgDur(tree, testSet, params.recognition)
                     : avgWork(tree, testSet, params.recognition) * params.secondsPerWorkUnit;
  score.score = params.fpWeight * score.numFPs + score.avgDur;
  return score;
}

namespace {

std::vector<RelationTopology> neighborsOf(const RelationTopology& current,
                                          const std::vector<Relation>& allPairs) {
  std::vector<Relation> present, absent;
  for (const Relation& r : allPairs) {
    (current.hasRelation(r.first, r.second) ? present : absent).push_back(r);
  }
  std::vector<RelationTopology> result;
  for (const Relation& r : absent) {
    RelationTopology next = current;
    next.addRelation(r.first, r.second);
    result.push_back(std::move(next));
  }
  for (const Relation& r : present) {
    RelationTopology next = current;
    next.removeRelation(r.first, r.second);
    if (next.isConnected()) result.push_back(std::move(next));
  }
  for (const Relation& out : present) {
    for (const Relation& in : absent) {
      RelationTopology next = current;
      next.removeRelation(out.first, out.second);
      next.addRelation(in.first, in.second);
      if (next.isConnected()) result.push_back(std::move(next));
    }
  }
  return result;
}

}  // namespace

RelationTopology selectTopology(const DemonstrationDataset& dataset, const TestSet& testSet,
                                const SearchParams& params) {
  if (params.iterationBudget == 0) {
    throw DomainError("BudgetZero", "topology search needs a positive iteration budget");
  }
  dataset.validate();
  params.recognition.validate();
  const std::vector<ObjectId> objects = dataset.objects();
  if (objects.size() == 2) return RelationTopology::complete(objects);

  const ObjectId center = params.startCenter.value_or(objects.front());
  RelationTopology current = RelationTopology::star(objects, center);

  std::vector<Relation> allPairs;
  for (std::size_t a = 0; a < objects.size(); ++a) {
    for (std::size_t b = a + 1; b < objects.size(); ++b) {
      allPairs.push_back(makeRelation(objects[a], objects[b]));
    }
  }

  std::map<std::set<Relation>, double> cache;
  auto scoreOf = [&](const RelationTopology& topology) {
    const auto it = cache.find(topology.relations());
    if (it != cache.end()) return it->second;
    const double s = scoreTopology(dataset, topology, testSet, params).score;
    cache.emplace(topology.relations(), s);
    return s;
  };

  double currentScore = scoreOf(current);
  for (std::size_t accepted = 0; accepted < params.iterationBudget; ++accepted) {
    bool improved = false;
    for (RelationTopology& candidate : neighborsOf(current, allPairs)) {
      const double s = scoreOf(candidate);
      if (s < currentScore) {
        current = std::move(candidate);
        currentScore = s;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return current;
}

}  // namespace ismtree
