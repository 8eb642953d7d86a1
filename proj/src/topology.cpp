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

#include "ismtree/topology.hpp"

#include "ismtree/errors.hpp"

#include <algorithm>
#include <deque>
#include <optional>

namespace ismtree {

Relation makeRelation(const ObjectId& a, const ObjectId& b) {
  return a < b ? Relation{a, b} : Relation{b, a};
}

RelationTopology::RelationTopology(const std::vector<ObjectId>& objects)
    : objects_(objects.begin(), objects.end()) {}

RelationTopology RelationTopology::star(const std::vector<ObjectId>& objects) {
  if (objects.empty()) return RelationTopology{};
  return star(objects, *std::min_element(objects.begin(), objects.end()));
}

RelationTopology RelationTopology::star(const std::vector<ObjectId>& objects,
                                        const ObjectId& center) {
  RelationTopology topology(objects);
  for (const ObjectId& id : topology.objects_) {
    if (id != center) topology.addRelation(center, id);
  }
  return topology;
}

RelationTopology RelationTopology::complete(const std::vector<ObjectId>& objects) {
  RelationTopology topology(objects);
  for (auto a = topology.objects_.begin(); a != topology.objects_.end(); ++a) {
    for (auto b = std::next(a); b != topology.objects_.end(); ++b) topology.addRelation(*a, *b);
  }
  return topology;
}

void RelationTopology::addObject(const ObjectId& id) { objects_.insert(id); }

bool RelationTopology::addRelation(const ObjectId& a, const ObjectId& b) {
  if (a == b) throw DomainError("InvalidTopology", "self-loop on " + a.str());
  if (!objects_.contains(a) || !objects_.contains(b)) {
    throw DomainError("InvalidTopology", "relation " + a.str() + " - " + b.str() +
                                             " references an unknown object");
  }
  return relations_.insert(makeRelation(a, b)).second;
}

bool RelationTopology::removeRelation(const ObjectId& a, const ObjectId& b) {
  return relations_.erase(makeRelation(a, b)) > 0;
}

bool RelationTopology::hasRelation(const ObjectId& a, const ObjectId& b) const {
  return relations_.contains(makeRelation(a, b));
}

std::vector<ObjectId> RelationTopology::neighbors(const ObjectId& id) const {
  std::vector<ObjectId> result;
  for (const auto& [a, b] : relations_) {
    if (a == id) result.push_back(b);
    if (b == id) result.push_back(a);
  }
  std::sort(result.begin(), result.end());
  return result;
}

std::size_t RelationTopology::degree(const ObjectId& id) const {
  return static_cast<std::size_t>(std::count_if(
      relations_.begin(), relations_.end(),
      [&](const Relation& r) { return r.first == id || r.second == id; }));
}

namespace {

std::map<ObjectId, std::vector<ObjectId>> adjacency(const RelationTopology& topology) {
  std::map<ObjectId, std::vector<ObjectId>> adj;
  for (const ObjectId& id : topology.objects()) adj[id];
  for (const auto& [a, b] : topology.relations()) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& [id, list] : adj) std::sort(list.begin(), list.end());
  return adj;
}

HeightFunction breadthFirstDepths(const RelationTopology& topology, const ObjectId& start) {
  const auto adj = adjacency(topology);
  HeightFunction depth{{start, 0}};
  std::deque<ObjectId> queue{start};
  while (!queue.empty()) {
    const ObjectId current = queue.front();
    queue.pop_front();
    for (const ObjectId& next : adj.at(current)) {
      if (depth.contains(next)) continue;
      depth[next] = depth[current] + 1;
      queue.push_back(next);
    }
  }
  return depth;
}

}  // namespace

bool RelationTopology::isConnected() const {
  if (objects_.empty()) return true;
  return breadthFirstDepths(*this, *objects_.begin()).size() == objects_.size();
}

StarPartition partitionIntoStars(const RelationTopology& topology) {
  if (topology.objects().size() < 2 || !topology.isConnected()) {
    throw DomainError("DisconnectedTopology", "relation topology is not connected");
  }

  auto remaining = adjacency(topology);
  auto remainingDegree = [&](const ObjectId& id) { return remaining.at(id).size(); };
  // Max remaining degree; the map iterates ids in ascending order, so ties keep the smallest.
  auto pickFrom = [&](const std::vector<ObjectId>& pool) {
    const ObjectId* best = nullptr;
    for (const ObjectId& id : pool) {
      if (remainingDegree(id) == 0) continue;
      if (!best || remainingDegree(id) > remainingDegree(*best)) best = &id;
    }
    return best ? std::optional<ObjectId>(*best) : std::nullopt;
  };
  std::vector<ObjectId> all(topology.objects().begin(), topology.objects().end());

  StarPartition partition;
  std::vector<std::size_t> stack;  // indices into partition.stars
  std::optional<ObjectId> next = pickFrom(all);
  while (next) {
    StarTopology star{*next, remaining.at(*next)};
    for (const ObjectId& other : star.neighborhood) {
      auto& list = remaining.at(other);
      list.erase(std::find(list.begin(), list.end(), *next));
    }
    remaining.at(*next).clear();
    partition.stars.push_back(std::move(star));
    stack.push_back(partition.stars.size() - 1);

    next.reset();
    while (!stack.empty() && !next) {
      next = pickFrom(partition.stars[stack.back()].neighborhood);
      if (!next) stack.pop_back();
    }
    if (!next) next = pickFrom(all);
  }

  partition.heights = breadthFirstDepths(topology, partition.stars.front().center);
  return partition;
}

}  // namespace ismtree
