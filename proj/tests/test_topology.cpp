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
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace ismtree;
using ismtree::testing::oid;

namespace {

std::vector<ObjectId> ids(std::initializer_list<const char*> labels) {
  std::vector<ObjectId> out;
  for (const char* l : labels) out.push_back(oid(l));
  return out;
}

std::string kindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const DomainError& e) {
    return e.kind();
  }
  return "";
}

/// Every relation lies in exactly one star, and stars only use existing relations.
void checkPartitionCoversRelations(const RelationTopology& t, const StarPartition& p) {
  std::map<Relation, int> covered;
  std::set<ObjectId> centers;
  for (const auto& s : p.stars) {
    CHECK_FALSE(s.neighborhood.empty());
    CHECK(std::is_sorted(s.neighborhood.begin(), s.neighborhood.end()));
    centers.insert(s.center);
    for (const auto& n : s.neighborhood) {
      CHECK(t.hasRelation(s.center, n));
      ++covered[makeRelation(s.center, n)];
    }
  }
  CHECK(centers.size() == p.stars.size());
  CHECK(covered.size() == t.relations().size());
  for (const auto& [r, count] : covered) CHECK(count == 1);
  for (const auto& o : t.objects()) CHECK(p.heights.count(o) == 1);
}

RelationTopology randomConnected(std::mt19937_64& rng, std::size_t n, double density) {
  std::vector<ObjectId> objects;
  for (std::size_t i = 0; i < n; ++i) objects.push_back(scenarioObjectId(i));
  RelationTopology t(objects);
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    t.addRelation(objects[i], objects[pick(rng)]);
  }
  std::bernoulli_distribution extra(density);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (extra(rng)) t.addRelation(objects[i], objects[j]);
    }
  }
  return t;
}

}  // namespace

TEST_CASE("relations are unordered") {
  RelationTopology t(ids({"A", "B"}));
  CHECK(t.addRelation(oid("B"), oid("A")));
  CHECK_FALSE(t.addRelation(oid("A"), oid("B")));
  CHECK(t.hasRelation(oid("A"), oid("B")));
  CHECK(t.relations().begin()->first == oid("A"));
  CHECK(kindOf([&] { t.addRelation(oid("A"), oid("A")); }) == "InvalidTopology");
  CHECK(kindOf([&] { t.addRelation(oid("A"), oid("Q")); }) == "InvalidTopology");
  CHECK(t.removeRelation(oid("A"), oid("B")));
  CHECK_FALSE(t.isConnected());
}

TEST_CASE("star and complete builders") {
  const auto objects = ids({"A", "B", "C", "D"});
  const auto star = RelationTopology::star(objects);
  CHECK(star.relations().size() == 3);
  CHECK(star.degree(oid("A")) == 3);
  const auto centered = RelationTopology::star(objects, oid("C"));
  CHECK(centered.degree(oid("C")) == 3);
  const auto complete = RelationTopology::complete(objects);
  CHECK(complete.relations().size() == 6);
  CHECK(complete.isConnected());
}

TEST_CASE("partition: two objects") {
  const auto p = partitionIntoStars(RelationTopology::complete(ids({"A", "B"})));
  REQUIRE(p.stars.size() == 1);
  CHECK(p.stars[0].center == oid("A"));
  CHECK(p.stars[0].neighborhood == ids({"B"}));
}

TEST_CASE("partition: a star stays one star") {
  const auto objects = ids({"A", "B", "C", "D", "E"});
  const auto p = partitionIntoStars(RelationTopology::star(objects, oid("D")));
  REQUIRE(p.stars.size() == 1);
  CHECK(p.stars[0].center == oid("D"));
  CHECK(p.heights.at(oid("D")) == 0);
  CHECK(p.heights.at(oid("A")) == 1);
}

TEST_CASE("partition: complete graph on three objects") {
  const auto p = partitionIntoStars(RelationTopology::complete(ids({"A", "B", "C"})));
  REQUIRE(p.stars.size() == 2);
  CHECK(p.stars[0] == StarTopology{oid("A"), ids({"B", "C"})});
  CHECK(p.stars[1] == StarTopology{oid("B"), ids({"C"})});
}

TEST_CASE("partition: breakfast setting") {
  const auto topology = ismtree::testing::settingTopology();
  REQUIRE(topology.relations().size() == 15);
  const auto p = partitionIntoStars(topology);
  checkPartitionCoversRelations(topology, p);
  std::vector<ObjectId> centers;
  for (const auto& s : p.stars) centers.push_back(s.center);
  CHECK(centers == ids({"PlateDeep", "CupPdV", "ForkLeft", "KnifeRight", "KnifeLeft"}));
  CHECK(p.stars[0].neighborhood.size() == 7);
  CHECK(p.heights.at(oid("PlateDeep")) == 0);
  CHECK(p.heights.at(oid("KnifeLeft")) == 1);
}

TEST_CASE("partition: disconnected topologies are rejected") {
  RelationTopology t(ids({"A", "B", "C", "D"}));
  t.addRelation(oid("A"), oid("B"));
  t.addRelation(oid("C"), oid("D"));
  CHECK(kindOf([&] { partitionIntoStars(t); }) == "DisconnectedTopology");
  CHECK(kindOf([&] { partitionIntoStars(RelationTopology(ids({"A"}))); }) == "DisconnectedTopology");
}

TEST_CASE("partition: random connected topologies") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 9;
    const auto t = randomConnected(rng, n, 0.3);
    const auto p = partitionIntoStars(t);
    checkPartitionCoversRelations(t, p);
    // Deterministic on repeat.
    const auto again = partitionIntoStars(t);
    CHECK(again.stars == p.stars);
    CHECK(again.heights == p.heights);
    // The first center has the maximum degree.
    std::size_t maxDegree = 0;
    for (const auto& o : t.objects()) maxDegree = std::max(maxDegree, t.degree(o));
    CHECK(t.degree(p.stars.front().center) == maxDegree);
  }
}

TEST_CASE("select: two objects give the single relation") {
  ScenarioSpec spec;
  spec.objectCount = 2;
  spec.length = 4;
  const auto dataset = generateDemonstration(spec);
  const auto testSet = generatePerturbedTestSet(dataset, PerturbationKind::Shift, 0.2, 4, 1);
  const auto t = selectTopology(dataset, testSet, SearchParams{});
  CHECK(t.relations().size() == 1);
}

TEST_CASE("select: zero budget is rejected") {
  ScenarioSpec spec;
  spec.objectCount = 3;
  spec.length = 4;
  const auto dataset = generateDemonstration(spec);
  const auto testSet = generatePerturbedTestSet(dataset, PerturbationKind::Shift, 0.2, 4, 1);
  SearchParams params;
  params.iterationBudget = 0;
  CHECK(kindOf([&] { selectTopology(dataset, testSet, params); }) == "BudgetZero");
}

TEST_CASE("select: a static scene keeps a connected topology no worse than the star") {
  ScenarioSpec spec;
  spec.objectCount = 4;
  spec.length = 5;
  spec.seed = 3;
  const auto dataset = generateDemonstration(spec);
  const auto testSet = generatePerturbedTestSet(dataset, PerturbationKind::Mixed, 0.3, 10, 2);
  SearchParams params;
  params.recognition.assemblyThreshold = 0.9;
  const auto chosen = selectTopology(dataset, testSet, params);
  CHECK(chosen.isConnected());
  CHECK(chosen.objects() == RelationTopology::star(dataset.objects()).objects());
  const auto chosenScore = scoreTopology(dataset, chosen, testSet, params);
  const auto starScore =
      scoreTopology(dataset, RelationTopology::star(dataset.objects()), testSet, params);
  CHECK(chosenScore.score <= starScore.score);
  CHECK(chosenScore.numFPs == doctest::Approx(0.0));
  // Same inputs, same answer.
  CHECK(selectTopology(dataset, testSet, params) == chosen);
}
