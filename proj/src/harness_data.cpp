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

#include <cmath>
#include <cstdio>
#include <random>
#include <set>

namespace ismtree {

void ScenarioSpec::validate() const {
  if (objectCount < 2) throw DomainError("InvalidScenario", "need at least two objects");
  if (length < 1) throw DomainError("InvalidScenario", "need at least one timestep");
  if (jitterPosition < 0 || jitterOrientationDeg < 0) {
    throw DomainError("InvalidScenario", "jitter must be non-negative");
  }
  if (!(workspace > 0)) throw DomainError("InvalidScenario", "workspace must be positive");
  std::set<std::size_t> seen;
  for (const auto& group : rigidGroups) {
    if (group.empty()) throw DomainError("InvalidScenario", "empty rigid group");
    for (std::size_t index : group) {
      if (index >= objectCount) throw DomainError("InvalidScenario", "group index out of range");
      if (!seen.insert(index).second) {
        throw DomainError("InvalidScenario", "object in more than one rigid group");
      }
    }
  }
}

ObjectId scenarioObjectId(std::size_t index) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "Object%02zu", index);
  return ObjectId{buffer, "0"};
}

namespace {

Eigen::Quaterniond yawQuaternion(double radians) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(radians, Eigen::Vector3d::UnitZ()));
}

Eigen::Vector3d randomUnitVector(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector3d v;
  do {
    v = Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
  } while (v.norm() < 1e-9);
  return v.normalized();
}

Pose jittered(const Pose& pose, double sigmaPosition, double sigmaDeg, std::mt19937_64& rng) {
  Eigen::Vector3d position = pose.position();
  Eigen::Quaterniond orientation = pose.orientation();
  if (sigmaPosition > 0) {
    std::normal_distribution<double> normal(0.0, sigmaPosition);
    position += Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
  }
  if (sigmaDeg > 0) {
    std::normal_distribution<double> normal(0.0, degToRad(sigmaDeg));
    const Eigen::Vector3d axis = randomUnitVector(rng);
    orientation = orientation * Eigen::Quaterniond(Eigen::AngleAxisd(normal(rng), axis));
  }
  return Pose(position, orientation);
}

}  // namespace

DemonstrationDataset generateDemonstration(const ScenarioSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> coordinate(-spec.workspace, spec.workspace);
  std::uniform_real_distribution<double> height(0.0, 0.3);
  std::uniform_real_distribution<double> angle(-EIGEN_PI, EIGEN_PI);

  // Base poses, kept at least 0.25 m apart where the workspace allows.
  std::vector<Pose> base;
  for (std::size_t i = 0; i < spec.objectCount; ++i) {
    Eigen::Vector3d position;
    for (int attempt = 0; attempt < 100; ++attempt) {
      position = Eigen::Vector3d(coordinate(rng), coordinate(rng), height(rng));
      bool clear = true;
      for (const Pose& other : base) clear = clear && (other.position() - position).norm() >= 0.25;
      if (clear) break;
    }
    base.emplace_back(position, yawQuaternion(angle(rng)));
  }

  std::vector<int> groupOf(spec.objectCount, -1);
  std::vector<Eigen::Vector3d> directions;
  for (std::size_t g = 0; g < spec.rigidGroups.size(); ++g) {
    const double theta = angle(rng);
    const Eigen::Vector3d direction(std::cos(theta), std::sin(theta), 0.0);
    directions.push_back(direction);
    const auto& group = spec.rigidGroups[g];
    const Pose anchor = base[group.front()];
    for (std::size_t k = 0; k < group.size(); ++k) {
      groupOf[group[k]] = static_cast<int>(g);
      if (spec.motion == MotionModel::RigidGroups) {
        base[group[k]] = Pose(anchor.position() + static_cast<double>(k) * spec.groupSpacing * direction,
                              anchor.orientation());
      }
    }
  }

  const double step =
      spec.length > 1 ? spec.groupTravel / static_cast<double>(spec.length - 1) : 0.0;
  DemonstrationDataset dataset;
  dataset.categoryLabel = spec.categoryLabel;
  for (std::size_t i = 0; i < spec.objectCount; ++i) {
    const ObjectId id = scenarioObjectId(i);
    dataset.trajectories[id] = Trajectory{id, {}};
  }
  for (std::size_t t = 0; t < spec.length; ++t) {
    for (std::size_t i = 0; i < spec.objectCount; ++i) {
      Pose pose = base[i];
      const int g = groupOf[i];
      if (spec.motion == MotionModel::RigidGroups && g >= 0) {
        const double offset = static_cast<double>(t) * step - spec.groupTravel / 2.0;
        pose = Pose(pose.position() + offset * directions[static_cast<std::size_t>(g)],
                    pose.orientation());
      } else if (spec.motion != MotionModel::Static) {
        pose = jittered(pose, spec.jitterPosition, spec.jitterOrientationDeg, rng);
      }
      dataset.trajectories[scenarioObjectId(i)].poses.push_back(pose);
    }
  }
  return dataset;
}

namespace {

struct PerturbationContext {
  const DemonstrationDataset& dataset;
  const RecognitionParams& tolerances;
  std::mt19937_64& rng;

  std::size_t pick(std::size_t count) {
    return std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
  }

  std::pair<std::vector<ObjectState>, std::size_t> demonstrated() {
    const std::size_t t = pick(dataset.length());
    return {dataset.configurationAt(t), t};
  }

  LabeledConfiguration swap() {
    auto [objects, t] = demonstrated();
    const std::size_t n = objects.size();
    const std::size_t a = pick(n);
    std::size_t b = pick(n - 1);
    if (b >= a) ++b;
    std::swap(objects[a].pose, objects[b].pose);
    LabeledConfiguration c;
    c.valid = approxEqual(objects[a].pose, objects[b].pose, 1e-12);
    c.description = "swap " + objects[a].id.str() + " " + objects[b].id.str() + " @" +
                    std::to_string(t + 1);
    c.objects = std::move(objects);
    return c;
  }

  LabeledConfiguration shift(double magnitude) {
    auto [objects, t] = demonstrated();
    const std::size_t i = pick(objects.size());
    const Eigen::Vector3d direction = randomUnitVector(rng);
    objects[i].pose = Pose(objects[i].pose.position() + magnitude * direction,
                           objects[i].pose.orientation());
    LabeledConfiguration c;
    c.valid = magnitude < tolerances.positionTolerance;
    c.description = "shift " + objects[i].id.str() + " @" + std::to_string(t + 1);
    c.objects = std::move(objects);
    return c;
  }

  LabeledConfiguration rotate(double magnitudeDeg) {
    auto [objects, t] = demonstrated();
    const std::size_t i = pick(objects.size());
    const Eigen::Vector3d axis = randomUnitVector(rng);
    objects[i].pose = Pose(objects[i].pose.position(),
                           objects[i].pose.orientation() *
                               Eigen::Quaterniond(Eigen::AngleAxisd(degToRad(magnitudeDeg), axis)));
    LabeledConfiguration c;
    c.valid = magnitudeDeg < tolerances.orientationToleranceDeg;
    c.description = "rotate " + objects[i].id.str() + " @" + std::to_string(t + 1);
    c.objects = std::move(objects);
    return c;
  }

  // Every object displaced by strictly less than a quarter of the tolerances.
  LabeledConfiguration jitteredDemonstration() {
    auto [objects, t] = demonstrated();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (ObjectState& state : objects) {
      const double d = 0.999 * unit(rng) * tolerances.positionTolerance / 4.0;
      const double a = 0.999 * unit(rng) * tolerances.orientationToleranceDeg / 4.0;
      const Eigen::Vector3d direction = randomUnitVector(rng);
      const Eigen::Vector3d axis = randomUnitVector(rng);
      state.pose = Pose(state.pose.position() + d * direction,
                        state.pose.orientation() *
                            Eigen::Quaterniond(Eigen::AngleAxisd(degToRad(a), axis)));
    }
    LabeledConfiguration c;
    c.valid = true;
    c.description = "jitter @" + std::to_string(t + 1);
    c.objects = std::move(objects);
    return c;
  }
};

}  // namespace

TestSet generatePerturbedTestSet(const DemonstrationDataset& dataset, PerturbationKind kind,
                                 double magnitude, std::size_t count, std::uint64_t seed,
                                 const RecognitionParams& tolerances) {
  dataset.validate();
  if ((kind == PerturbationKind::Shift || kind == PerturbationKind::Rotate) && !(magnitude > 0)) {
    throw DomainError("InvalidParams", "perturbation magnitude must be positive");
  }
  std::mt19937_64 rng(seed);
  PerturbationContext context{dataset, tolerances, rng};
  TestSet set;
  set.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    switch (kind) {
      case PerturbationKind::Swap:
        set.push_back(context.swap());
        break;
      case PerturbationKind::Shift:
        set.push_back(context.shift(magnitude));
        break;
      case PerturbationKind::Rotate:
        set.push_back(context.rotate(magnitude));
        break;
      case PerturbationKind::Mixed:
        if (k % 2 == 0) {
          set.push_back(context.jitteredDemonstration());
        } else {
          LabeledConfiguration c = (k / 2) % 2 == 0 ? context.swap() : LabeledConfiguration{};
          if (c.objects.empty() || c.valid) {
            c = context.shift(std::max(magnitude, 1.5 * tolerances.positionTolerance));
          }
          set.push_back(std::move(c));
        }
        break;
    }
  }
  return set;
}

}  // namespace ismtree
