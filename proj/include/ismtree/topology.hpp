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

#include <map>
#include <set>
#include <utility>
#include <vector>

namespace ismtree {

/// Unordered object pair, stored with first < second.
using Relation = std::pair<ObjectId, ObjectId>;

Relation makeRelation(const ObjectId& a, const ObjectId& b);

/// Undirected graph whose edges mark which object pairs share a spatial relation.
class RelationTopology {
 public:
  RelationTopology() = default;
  explicit RelationTopology(const std::vector<ObjectId>& objects);

  /// One center related to every other object. Center defaults to the smallest id.
  static RelationTopology star(const std::vector<ObjectId>& objects);
  static RelationTopology star(const std::vector<ObjectId>& objects, const ObjectId& center);
  static RelationTopology complete(const std::vector<ObjectId>& objects);

  void addObject(const ObjectId& id);
  /// Throws DomainError("InvalidTopology") on self-loops or unknown endpoints.
  bool addRelation(const ObjectId& a, const ObjectId& b);
  bool removeRelation(const ObjectId& a, const ObjectId& b);
  bool hasRelation(const ObjectId& a, const ObjectId& b) const;

  const std::set<ObjectId>& objects() const { return objects_; }
  const std::set<Relation>& relations() const { return relations_; }
  std::vector<ObjectId> neighbors(const ObjectId& id) const;
  std::size_t degree(const ObjectId& id) const;
  bool isConnected() const;

  bool operator==(const RelationTopology&) const = default;

 private:
  std::set<ObjectId> objects_;
  std::set<Relation> relations_;
};

struct StarTopology {
  ObjectId center;
  std::vector<ObjectId> neighborhood;  // sorted, may hold placeholder ids during tree generation

  bool operator==(const StarTopology&) const = default;
};

/// Breadth-first depth of every object from the first extracted star center.
using HeightFunction = std::map<ObjectId, int>;

struct StarPartition {
  std::vector<StarTopology> stars;  // in extraction order
  HeightFunction heights;
};

/// Depth-first extraction of stars, each centered at the eligible object with the most
/// remaining relations (ties: smallest id). Throws DomainError("DisconnectedTopology").
StarPartition partitionIntoStars(const RelationTopology& topology);

}  // namespace ismtree
