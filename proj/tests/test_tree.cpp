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
using ismtree::testing::settingDataset;
using ismtree::testing::settingTopology;

namespace {

IsmTree settingTree() { return learnIsmTree(settingDataset(6, 1), settingTopology()); }

std::vector<ObjectState> without(std::vector<ObjectState> states, std::set<std::string> labels) {
  std::erase_if(states, [&](const ObjectState& s) { return labels.contains(s.id.classLabel); });
  return states;
}

}  // namespace

TEST_CASE("generate: a single star gives one ISM named after the category") {
  ScenarioSpec spec;
  spec.categoryLabel = "office";
  spec.objectCount = 3;
  spec.length = 4;
  const auto dataset = generateDemonstration(spec);
  const auto tree = learnIsmTree(dataset, RelationTopology::star(dataset.objects()));
  CHECK(tree.isms.size() == 1);
  CHECK(tree.root == "office");
  CHECK(tree.height() == 0);
  CHECK(tree.realObjects().size() == 3);
}

TEST_CASE("generate: breakfast setting") {
  const auto tree = settingTree();
  CHECK(tree.root == "setting");
  CHECK(tree.isms.size() == 5);
  CHECK(tree.height() == 1);
  CHECK(tree.ism("setting_sub3").referenceId == placeholderIdFor("setting_sub3"));
  CHECK(tree.ism("setting_sub3").voteTable.contains(oid("KnifeLeft")));
  CHECK(tree.ism("setting_sub2").voteTable.contains(oid("KnifeRight")));
  CHECK(tree.ism("setting_sub1").voteTable.contains(oid("ForkLeft")));
  CHECK(tree.ism("setting_sub0").voteTable.contains(oid("CupPdV")));
  for (int i = 0; i < 4; ++i) {
    const std::string label = "setting_sub" + std::to_string(i);
    CHECK(tree.levelOf.at(label) == 1);
    CHECK(tree.parentLink.at(label).parent == "setting");
    CHECK(tree.ism("setting").voteTable.contains(placeholderIdFor(label)));
  }
  // KnifeLeft was replaced by the placeholder in the root.
  CHECK_FALSE(tree.ism("setting").voteTable.contains(oid("KnifeLeft")));
  CHECK(tree.ism("setting").voteTable.contains(oid("ForkRight")));
  CHECK(tree.realObjects().size() == 8);
  // Placeholder weights are the sub-ISM's total weight.
  CHECK(tree.ism("setting").weightOf(placeholderIdFor("setting_sub0")) ==
        tree.ism("setting_sub0").totalWeight());
  const auto order = tree.evaluationOrder();
  CHECK(order == std::vector<std::string>{"setting_sub0", "setting_sub1", "setting_sub2",
                                          "setting_sub3", "setting"});
}

TEST_CASE("generate: chain of three objects from hand-built stars") {
  // A-B-C with B as the root star's center and a leaf star centered at C.
  std::mt19937_64 rng(8);
  std::vector<std::pair<std::string, std::vector<Pose>>> trajectories;
  for (const char* name : {"A", "B", "C"}) {
    std::vector<Pose> poses;
    for (int t = 0; t < 4; ++t) poses.push_back(ismtree::testing::randomPose(rng));
    trajectories.emplace_back(name, poses);
  }
  const auto dataset = ismtree::testing::makeDataset("chain", trajectories);
  StarPartition partition;
  partition.stars = {{oid("B"), {oid("A"), oid("C")}}, {oid("C"), {oid("A")}}};
  partition.heights = {{oid("B"), 0}, {oid("A"), 1}, {oid("C"), 1}};
  const auto tree = generateIsmTree("chain", partition, dataset);
  CHECK(tree.isms.size() == 2);
  CHECK(tree.height() == 1);
  CHECK(tree.parentLink.at("chain_sub0").parent == "chain");
  const auto& root = tree.ism("chain");
  CHECK(root.voteTable.contains(placeholderIdFor("chain_sub0")));
  CHECK_FALSE(root.voteTable.contains(oid("C")));
  CHECK(root.weightOf(placeholderIdFor("chain_sub0")) == 2);
  // The placeholder follows C's trajectory.
  const auto& samples = root.voteTable.at(placeholderIdFor("chain_sub0"));
  for (std::size_t t = 0; t < 4; ++t) {
    CHECK(approxEqual(samples[t].voteToReference,
                      relativePose(dataset.trajectories.at(oid("C")).poses[t],
                                   dataset.trajectories.at(oid("B")).poses[t])));
  }
}

TEST_CASE("generate: no attachment point") {
  ScenarioSpec spec;
  spec.objectCount = 4;
  spec.length = 2;
  const auto dataset = generateDemonstration(spec);
  const auto o = dataset.objects();
  StarPartition partition;
  partition.stars = {{o[0], {o[1]}}, {o[2], {o[3]}}};
  partition.heights = {{o[0], 0}, {o[1], 1}, {o[2], 1}, {o[3], 2}};
  try {
    generateIsmTree("scene", partition, dataset);
    FAIL("expected NoAttachmentPoint");
  } catch (const DomainError& e) {
    CHECK(e.kind() == "NoAttachmentPoint");
  }
}

TEST_CASE("tree validation catches broken links") {
  auto tree = settingTree();
  CHECK_NOTHROW(tree.validate());
  tree.levelOf["setting_sub0"] = 2;
  CHECK_THROWS_AS(tree.validate(), DomainError);
  tree = settingTree();
  tree.parentLink["setting_sub0"].parent = "nowhere";
  CHECK_THROWS_AS(tree.validate(), DomainError);
}

TEST_CASE("evaluate: every demonstrated configuration is recognized through the hierarchy") {
  const auto dataset = settingDataset(6, 1);
  const auto tree = learnIsmTree(dataset, settingTopology());
  for (std::size_t t = 0; t < dataset.length(); ++t) {
    const auto inputs = dataset.configurationAt(t);
    const auto results = evaluateIsmsInTree(inputs, tree, RecognitionParams{});
    std::set<std::string> labels;
    for (const auto& r : results) labels.insert(r.ismLabel);
    CHECK(labels.size() == 5);
    const auto instances = recognizeScene(inputs, tree, RecognitionParams{});
    REQUIRE_FALSE(instances.empty());
    CHECK(instances.front().confidence >= 1.0 - 1e-6);
    CHECK(instances.front().subResults.size() == 4);
    CHECK(instances.front().realParticipants().size() == 8);
    CHECK(approxEqual(instances.front().pose, dataset.trajectories.at(oid("PlateDeep")).poses[t]));
  }
}

TEST_CASE("evaluate: empty input") {
  CHECK(evaluateIsmsInTree({}, settingTree(), RecognitionParams{}).empty());
  CHECK(recognizeScene({}, settingTree(), RecognitionParams{}).empty());
}

TEST_CASE("evaluate: removing a sub-ISM's objects drops the root objective by its weight") {
  // Root star B{A, C}; leaf star C{D} becomes chain_sub0 with weight 2 inside the root.
  std::mt19937_64 rng(9);
  std::vector<std::pair<std::string, std::vector<Pose>>> trajectories;
  for (const char* name : {"A", "B", "C", "D"}) {
    std::vector<Pose> poses;
    for (int t = 0; t < 4; ++t) poses.push_back(ismtree::testing::randomPose(rng));
    trajectories.emplace_back(name, poses);
  }
  const auto dataset = ismtree::testing::makeDataset("chain", trajectories);
  StarPartition partition;
  partition.stars = {{oid("B"), {oid("A"), oid("C")}}, {oid("C"), {oid("D")}}};
  partition.heights = {{oid("B"), 0}, {oid("A"), 1}, {oid("C"), 1}, {oid("D"), 2}};
  const auto tree = generateIsmTree("chain", partition, dataset);
  const auto& root = tree.ism("chain");
  REQUIRE(root.totalWeight() == 4);

  const auto inputs = without(dataset.configurationAt(1), {"C", "D"});
  const auto results = evaluateIsmsInTree(inputs, tree, RecognitionParams{});
  double rootBest = 0;
  for (const auto& r : results) {
    CHECK(r.ismLabel != "chain_sub0");
    if (r.ismLabel == "chain") rootBest = std::max(rootBest, r.objectiveValue);
  }
  CHECK(rootBest == doctest::Approx(root.totalWeight() - root.weightOf(placeholderIdFor("chain_sub0"))));
}

TEST_CASE("evaluate: a leaf found only in the root costs exactly its weight") {
  const auto dataset = settingDataset(6, 1);
  const auto tree = learnIsmTree(dataset, settingTopology());
  const auto inputs = without(dataset.configurationAt(2), {"PlateDeep"});
  double rootBest = 0;
  for (const auto& r : evaluateIsmsInTree(inputs, tree, RecognitionParams{})) {
    if (r.ismLabel == "setting") rootBest = std::max(rootBest, r.objectiveValue);
  }
  CHECK(rootBest == doctest::Approx(tree.ism("setting").totalWeight() - 1));
}

TEST_CASE("evaluate: removing leaves never raises the root objective") {
  const auto dataset = settingDataset(5, 2);
  const auto tree = learnIsmTree(dataset, settingTopology());
  std::mt19937_64 rng(40);
  const auto full = dataset.configurationAt(1);
  auto best = [&](std::span<const ObjectState> inputs) {
    double value = 0;
    for (const auto& r : evaluateIsmsInTree(inputs, tree, RecognitionParams{})) {
      if (r.ismLabel == tree.root) value = std::max(value, r.objectiveValue);
    }
    return value;
  };
  const double reference = best(full);
  for (int trial = 0; trial < 20; ++trial) {
    auto inputs = full;
    std::shuffle(inputs.begin(), inputs.end(), rng);
    inputs.resize(1 + trial % 7);
    CHECK(best(inputs) <= reference + 1e-9);
  }
}

TEST_CASE("assemble: threshold gate") {
  const auto dataset = settingDataset(4, 3);
  const auto tree = learnIsmTree(dataset, settingTopology());
  const auto inputs = without(dataset.configurationAt(0), {"ForkRight", "SpoonLarge"});
  RecognitionParams params;
  const auto all = evaluateIsmsInTree(inputs, tree, params);
  double rootBest = 0;
  for (const auto& r : all) {
    if (r.ismLabel == tree.root) rootBest = std::max(rootBest, r.confidence);
  }
  REQUIRE(rootBest < 1.0);
  CHECK(assembleInstances(all, tree, rootBest + 1e-6).empty());
  CHECK_FALSE(assembleInstances(all, tree, rootBest).empty());
}

TEST_CASE("assemble: sub-results match parent participants by token") {
  const auto dataset = settingDataset(4, 4);
  const auto tree = learnIsmTree(dataset, settingTopology());
  const auto instances = recognizeScene(dataset.configurationAt(3), tree, RecognitionParams{});
  REQUIRE_FALSE(instances.empty());
  for (const auto& instance : instances) {
    std::vector<const RecognitionResult*> parents{&instance.rootResult};
    for (const auto& sub : instance.subResults) parents.push_back(&sub);
    for (const auto& sub : instance.subResults) {
      std::size_t owners = 0;
      for (const auto* parent : parents) {
        for (const auto& p : parent->participants) owners += p.state.token == sub.token ? 1 : 0;
      }
      CHECK(owners == 1);
    }
  }
}

TEST_CASE("assemble: two disjoint copies give two instances") {
  const auto dataset = settingDataset(4, 5);
  const auto tree = learnIsmTree(dataset, settingTopology());
  auto inputs = dataset.configurationAt(0);
  const auto copy = ismtree::testing::transformed(dataset.configurationAt(0),
                                                  Pose::translation(10, 0, 0));
  inputs.insert(inputs.end(), copy.begin(), copy.end());
  const auto instances = recognizeScene(inputs, tree, RecognitionParams{});
  std::vector<const SceneInstance*> full;
  for (const auto& i : instances) {
    if (i.confidence >= 1.0 - 1e-6) full.push_back(&i);
  }
  REQUIRE(full.size() == 2);
  const double x0 = full[0]->pose.position().x(), x1 = full[1]->pose.position().x();
  CHECK(std::abs(x0 - x1) == doctest::Approx(10.0));
  for (const auto* i : full) {
    const double x = i->pose.position().x();
    for (const auto& s : i->realParticipants()) {
      CHECK(std::abs(s.pose.position().x() - x) < 1.0);
    }
  }
}

TEST_CASE("recognize: a complete tree rejects a swap that a star accepts") {
  ScenarioSpec spec;
  spec.objectCount = 3;
  spec.length = 7;
  spec.motion = MotionModel::RigidGroups;
  spec.rigidGroups = {{1, 2}};
  spec.seed = 2;
  const auto dataset = generateDemonstration(spec);
  const auto o = dataset.objects();
  const auto star = learnIsmTree(dataset, RelationTopology::star(dataset.objects(), o[0]));
  const auto complete = learnIsmTree(dataset, RelationTopology::complete(dataset.objects()));
  // Object01 at its pose from timestep 0, Object02 from timestep 6 (both demonstrated relative
  // to the static center, but never together).
  auto inputs = dataset.configurationAt(0);
  inputs[2].pose = dataset.trajectories.at(o[2]).poses[6];
  auto best = [&](const IsmTree& tree) {
    RecognitionParams params;
    params.assemblyThreshold = 0.0;
    double b = 0;
    for (const auto& i : recognizeScene(inputs, tree, params)) b = std::max(b, i.confidence);
    return b;
  };
  CHECK(best(star) >= 1.0 - 1e-6);
  CHECK(best(complete) < best(star));
}

TEST_CASE("recognize: rigid motion leaves the confidence unchanged") {
  const auto dataset = settingDataset(5, 6);
  const auto tree = learnIsmTree(dataset, settingTopology());
  auto inputs = dataset.configurationAt(2);
  inputs[3].pose = composePose(Pose::translation(0.03, 0.01, 0), inputs[3].pose);
  const auto base = recognizeScene(inputs, tree, RecognitionParams{});
  REQUIRE_FALSE(base.empty());
  std::mt19937_64 rng(60);
  for (int k = 0; k < 20; ++k) {
    const Pose g = ismtree::testing::randomPose(rng, 4.0);
    const auto moved = recognizeScene(ismtree::testing::transformed(inputs, g), tree, RecognitionParams{});
    REQUIRE_FALSE(moved.empty());
    CHECK(std::abs(moved.front().confidence - base.front().confidence) <= 1e-6);
    CHECK(approxEqual(moved.front().pose, composePose(g, base.front().pose), 1e-9));
  }
}
