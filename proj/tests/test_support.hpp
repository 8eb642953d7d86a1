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

#include "ismtree/harness.hpp"

#include <random>
#include <string>
#include <vector>

namespace ismtree::testing {

inline Pose randomPose(std::mt19937_64& rng, double extent = 1.0) {
  std::uniform_real_distribution<double> coordinate(-extent, extent);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
  q.normalize();
  return Pose(Eigen::Vector3d(coordinate(rng), coordinate(rng), coordinate(rng)), q);
}

inline Eigen::Matrix4d pureMatrix(const Pose& p) {
  // Built from the rotation matrix, not from Pose::matrix, so tests do not trust the code
  // under test for their expectations.
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  const Eigen::Quaterniond& q = p.orientation();
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  m(0, 0) = 1 - 2 * (y * y + z * z);
  m(0, 1) = 2 * (x * y - z * w);
  m(0, 2) = 2 * (x * z + y * w);
  m(1, 0) = 2 * (x * y + z * w);
  m(1, 1) = 1 - 2 * (x * x + z * z);
  m(1, 2) = 2 * (y * z - x * w);
  m(2, 0) = 2 * (x * z - y * w);
  m(2, 1) = 2 * (y * z + x * w);
  m(2, 2) = 1 - 2 * (x * x + y * y);
  m.topRightCorner<3, 1>() = p.position();
  return m;
}

inline bool matrixNear(const Eigen::Matrix4d& a, const Eigen::Matrix4d& b, double tol = 1e-9) {
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

inline ObjectId oid(const std::string& label) { return ObjectId{label, "0"}; }

/// Dataset from per-object pose lists (all of equal length).
inline DemonstrationDataset makeDataset(const std::string& category,
                                        const std::vector<std::pair<std::string, std::vector<Pose>>>&
                                            trajectories) {
  DemonstrationDataset dataset;
  dataset.categoryLabel = category;
  for (const auto& [label, poses] : trajectories) {
    dataset.trajectories[oid(label)] = Trajectory{oid(label), poses};
  }
  return dataset;
}

inline std::vector<ObjectState> transformed(const std::vector<ObjectState>& states, const Pose& g) {
  std::vector<ObjectState> out = states;
  for (ObjectState& s : out) s.pose = composePose(g, s.pose);
  return out;
}

/// Eight objects with the relation topology of a breakfast table setting.
inline RelationTopology settingTopology() {
  const std::vector<std::string> names{"CupPdV",   "ForkLeft",  "ForkRight",  "KnifeLeft",
                                       "KnifeRight", "PlateDeep", "SpoonLarge", "SpoonSmall"};
  std::vector<ObjectId> ids;
  for (const auto& n : names) ids.push_back(oid(n));
  RelationTopology t(ids);
  for (const auto& n : names) {
    if (n != "PlateDeep") t.addRelation(oid("PlateDeep"), oid(n));
  }
  t.addRelation(oid("CupPdV"), oid("SpoonLarge"));
  t.addRelation(oid("CupPdV"), oid("SpoonSmall"));
  t.addRelation(oid("CupPdV"), oid("ForkLeft"));
  t.addRelation(oid("ForkLeft"), oid("ForkRight"));
  t.addRelation(oid("ForkLeft"), oid("KnifeRight"));
  t.addRelation(oid("KnifeRight"), oid("SpoonLarge"));
  t.addRelation(oid("KnifeRight"), oid("KnifeLeft"));
  t.addRelation(oid("KnifeLeft"), oid("SpoonSmall"));
  return t;
}

/// Jittered demonstration over the setting's eight objects.
inline DemonstrationDataset settingDataset(std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 0.01);
  const std::vector<std::pair<std::string, Eigen::Vector3d>> layout{
      {"PlateDeep", {0.0, 0.0, 0.0}},     {"CupPdV", {0.25, 0.2, 0.0}},
      {"ForkLeft", {-0.2, 0.0, 0.0}},     {"ForkRight", {-0.25, 0.0, 0.0}},
      {"KnifeLeft", {0.2, 0.0, 0.0}},     {"KnifeRight", {0.25, 0.0, 0.0}},
      {"SpoonLarge", {0.3, 0.05, 0.0}},   {"SpoonSmall", {0.0, 0.2, 0.0}}};
  std::vector<std::pair<std::string, std::vector<Pose>>> trajectories;
  for (const auto& [name, base] : layout) {
    std::vector<Pose> poses;
    for (std::size_t t = 0; t < length; ++t) {
      const Eigen::Vector3d p = base + Eigen::Vector3d(jitter(rng), jitter(rng), 0.0);
      poses.emplace_back(p, Eigen::Quaterniond(Eigen::AngleAxisd(jitter(rng), Eigen::Vector3d::UnitZ())));
    }
    trajectories.emplace_back(name, poses);
  }
  return makeDataset("setting", trajectories);
}

}  // namespace ismtree::testing
