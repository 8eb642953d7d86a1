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

#include "ismtree/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace ismtree {

namespace {

Eigen::Quaterniond normalizedIfNeeded(const Eigen::Quaterniond& q) {
  const double squared = q.squaredNorm();
  if (std::abs(squared - 1.0) <= 1e-14) return q;
  if (squared == 0.0) return Eigen::Quaterniond::Identity();
  return q.normalized();
}

}  // namespace

Pose::Pose(const Eigen::Vector3d& position, const Eigen::Quaterniond& orientation)
    : position_(position), orientation_(normalizedIfNeeded(orientation)) {}

Pose Pose::translation(double x, double y, double z) {
  return Pose(Eigen::Vector3d(x, y, z), Eigen::Quaterniond::Identity());
}

Pose Pose::rotationZ(double degrees) {
  return Pose(Eigen::Vector3d::Zero(),
              Eigen::Quaterniond(Eigen::AngleAxisd(degToRad(degrees), Eigen::Vector3d::UnitZ())));
}

Pose Pose::fromMatrix(const Eigen::Matrix4d& matrix) {
  const Eigen::Matrix3d rotation = matrix.topLeftCorner<3, 3>();
  return Pose(matrix.topRightCorner<3, 1>(), Eigen::Quaterniond(rotation));
}

Pose Pose::fromArray(const std::array<double, 7>& v) {
  return Pose(Eigen::Vector3d(v[0], v[1], v[2]), Eigen::Quaterniond(v[3], v[4], v[5], v[6]));
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = orientation_.toRotationMatrix();
  m.topRightCorner<3, 1>() = position_;
  return m;
}

std::array<double, 7> Pose::toArray() const {
  return {position_.x(), position_.y(), position_.z(), orientation_.w(),
          orientation_.x(), orientation_.y(), orientation_.z()};
}

Pose composePose(const Pose& a, const Pose& b) {
  return Pose(a.position() + a.orientation() * b.position(), a.orientation() * b.orientation());
}

Pose invertPose(const Pose& p) {
  const Eigen::Quaterniond inverse = p.orientation().conjugate();
  return Pose(-(inverse * p.position()), inverse);
}

Pose relativePose(const Pose& from, const Pose& to) {
  const Eigen::Quaterniond inverse = from.orientation().conjugate();
  return Pose(inverse * (to.position() - from.position()), inverse * to.orientation());
}

double positionDistance(const Pose& a, const Pose& b) {
  return (a.position() - b.position()).norm();
}

double orientationAngle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  // atan2 form stays accurate for tiny angles where acos(dot) loses ~1e-8 rad.
  const Eigen::Quaterniond delta = a.conjugate() * b;
  return radToDeg(2.0 * std::atan2(delta.vec().norm(), std::abs(delta.w())));
}

double orientationAngle(const Pose& a, const Pose& b) {
  return orientationAngle(a.orientation(), b.orientation());
}

bool approxEqual(const Pose& a, const Pose& b, double tolerance) {
  if ((a.position() - b.position()).cwiseAbs().maxCoeff() > tolerance) return false;
  const Eigen::Vector4d qa = a.orientation().coeffs();
  Eigen::Vector4d qb = b.orientation().coeffs();
  if (qa.dot(qb) < 0.0) qb = -qb;
  return (qa - qb).cwiseAbs().maxCoeff() <= tolerance;
}

}  // namespace ismtree
