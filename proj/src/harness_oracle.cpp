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

namespace ismtree {

namespace {

// Rotation angle in degrees between the rotation blocks of two transforms.
double rotationAngleDeg(const Eigen::Matrix4d& a, const Eigen::Matrix4d& b) {
  const Eigen::Matrix3d m = a.topLeftCorner<3, 3>().transpose() * b.topLeftCorner<3, 3>();
  const Eigen::Vector3d axis(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  const double c = (m.trace() - 1.0) / 2.0;
  return std::atan2(0.5 * axis.norm(), c) * 180.0 / EIGEN_PI;
}

double linearFalloff(double deviation, double tolerance) {
  const double value = 1.0 - deviation / tolerance;
  return value > 0.0 ? value : 0.0;
}

}  // namespace

OracleResult bruteForceRecognitionOracle(std::span<const ObjectState> inputs,
                                         const DemonstrationDataset& dataset,
                                         const RelationTopology& topology,
                                         const RecognitionParams& params) {
  dataset.validate();
  params.validate();
  const std::size_t n = topology.objects().size();
  const std::size_t l = dataset.length();
  if (n > 4 || l > 10) {
    throw DomainError("TooLargeForOracle", "oracle is limited to 4 objects and 10 timesteps");
  }
  if (topology.relations().size() + 1 != n) {
    throw DomainError("InvalidTopology", "oracle expects a star topology");
  }
  const ObjectId* center = nullptr;
  for (const ObjectId& id : topology.objects()) {
    if (topology.degree(id) == n - 1) {
      center = &id;
      break;
    }
  }
  if (!center) throw DomainError("InvalidTopology", "oracle expects a star topology");

  // relation[o][t]: pose of object o in the reference (center) frame at timestep t.
  std::vector<ObjectId> objects(topology.objects().begin(), topology.objects().end());
  std::vector<std::vector<Eigen::Matrix4d>> relation(objects.size());
  const auto& centerPoses = dataset.trajectories.at(*center).poses;
  for (std::size_t o = 0; o < objects.size(); ++o) {
    const auto& poses = dataset.trajectories.at(objects[o]).poses;
    for (std::size_t t = 0; t < l; ++t) {
      relation[o].push_back(centerPoses[t].matrix().inverse() * poses[t].matrix());
    }
  }
  std::vector<Eigen::Matrix4d> inputMatrix;
  for (const ObjectState& state : inputs) inputMatrix.push_back(state.pose.matrix());

  OracleResult best;
  bool any = false;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t o = 0; o < objects.size(); ++o) {
      if (inputs[i].id != objects[o]) continue;
      for (std::size_t t = 0; t < l; ++t) {
        const Eigen::Matrix4d reference = inputMatrix[i] * relation[o][t].inverse();
        OracleResult candidate;
        candidate.referencePose = reference;
        for (std::size_t p = 0; p < objects.size(); ++p) {
          OracleMatch match{objects[p], 0, 0, 0.0};
          double bestScore = 0;
          for (std::size_t j = 0; j < inputs.size(); ++j) {
            if (inputs[j].id != objects[p]) continue;
            for (std::size_t u = 0; u < l; ++u) {
              const Eigen::Matrix4d expected = reference * relation[p][u];
              const double deviation =
                  (expected.topRightCorner<3, 1>() - inputMatrix[j].topRightCorner<3, 1>()).norm();
              const double similarity =
                  linearFalloff(deviation, params.positionTolerance) *
                  linearFalloff(rotationAngleDeg(expected, inputMatrix[j]),
                                params.orientationToleranceDeg);
              const double score = inputs[j].confidence * similarity;
              if (score > bestScore) {
                bestScore = score;
                match = OracleMatch{objects[p], j, static_cast<int>(u + 1), similarity};
              }
            }
          }
          if (bestScore > 0) {
            candidate.objectiveValue += bestScore;
            candidate.assignment.push_back(match);
          }
        }
        if (!any || candidate.objectiveValue > best.objectiveValue) {
          best = std::move(candidate);
          any = true;
        }
      }
    }
  }
  return best;
}

}  // namespace ismtree
