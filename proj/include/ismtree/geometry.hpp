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

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>

namespace ismtree {

/// Rigid 6-DoF transform: position in meters plus a unit quaternion.
///
/// The orientation is renormalized on construction unless it is already unit
/// length to within 1e-14, which keeps repeated construction idempotent (and
/// keeps serialized models bit-exact on reload).
class Pose {
 public:
  Pose() : position_(Eigen::Vector3d::Zero()), orientation_(Eigen::Quaterniond::Identity()) {}
  Pose(const Eigen::Vector3d& position, const Eigen::Quaterniond& orientation);

  static Pose identity() { return Pose(); }
  static Pose translation(double x, double y, double z);
  static Pose rotationZ(double degrees);
  static Pose fromMatrix(const Eigen::Matrix4d& matrix);
  /// Layout [px, py, pz, qw, qx, qy, qz].
  static Pose fromArray(const std::array<double, 7>& values);

  const Eigen::Vector3d& position() const { return position_; }
  const Eigen::Quaterniond& orientation() const { return orientation_; }

  Eigen::Matrix4d matrix() const;
  std::array<double, 7> toArray() const;

  Eigen::Vector3d transformPoint(const Eigen::Vector3d& point) const {
    return position_ + orientation_ * point;
  }

 private:
  Eigen::Vector3d position_;
  Eigen::Quaterniond orientation_;
};

/// a then b: matrix(a) * matrix(b).
Pose composePose(const Pose& a, const Pose& b);
Pose invertPose(const Pose& p);
/// Pose of `to` expressed in the frame of `from`, so composePose(from, result) == to.
Pose relativePose(const Pose& from, const Pose& to);

double positionDistance(const Pose& a, const Pose& b);
/// Minimal rotation angle between two orientations in degrees, in [0, 180]; q and -q are equal.
double orientationAngle(const Pose& a, const Pose& b);
double orientationAngle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b);

/// Component-wise comparison within an absolute tolerance, treating q and -q as equal.
bool approxEqual(const Pose& a, const Pose& b, double tolerance = 1e-9);

inline double degToRad(double degrees) { return degrees * EIGEN_PI / 180.0; }
inline double radToDeg(double radians) { return radians * 180.0 / EIGEN_PI; }

}  // namespace ismtree
