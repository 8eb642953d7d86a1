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

#include "test_support.hpp"

#include <doctest.h>

using namespace ismtree;
using ismtree::testing::matrixNear;
using ismtree::testing::pureMatrix;
using ismtree::testing::randomPose;

TEST_CASE("compose: identity and pure translations") {
  std::mt19937_64 rng(1);
  const Pose p = randomPose(rng);
  CHECK(approxEqual(composePose(Pose::identity(), p), p));
  CHECK(approxEqual(composePose(p, Pose::identity()), p));
  CHECK(approxEqual(composePose(Pose::translation(1, 0, 0), Pose::translation(0, 1, 0)),
                    Pose::translation(1, 1, 0)));
}

TEST_CASE("compose: rotation then translation") {
  const Pose r = composePose(Pose::rotationZ(90), Pose::translation(1, 0, 0));
  CHECK(r.position().isApprox(Eigen::Vector3d(0, 1, 0), 1e-12));
  CHECK(orientationAngle(r, Pose::rotationZ(90)) < 1e-9);
  Eigen::Matrix4d expected;
  expected << 0, -1, 0, 0,
              1, 0, 0, 1,
              0, 0, 1, 0,
              0, 0, 0, 1;
  CHECK(matrixNear(r.matrix(), expected));
}

TEST_CASE("compose matches the 4x4 product on random poses") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const Pose a = randomPose(rng), b = randomPose(rng), c = randomPose(rng);
    CHECK(matrixNear(pureMatrix(composePose(a, b)), pureMatrix(a) * pureMatrix(b)));
    CHECK(approxEqual(composePose(composePose(a, b), c), composePose(a, composePose(b, c))));
  }
}

TEST_CASE("invert") {
  CHECK(approxEqual(invertPose(Pose::identity()), Pose::identity()));
  CHECK(approxEqual(invertPose(Pose::translation(1, 2, 3)), Pose::translation(-1, -2, -3)));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Pose p = randomPose(rng);
    CHECK(approxEqual(composePose(p, invertPose(p)), Pose::identity()));
    CHECK(approxEqual(invertPose(invertPose(p)), p));
  }
}

TEST_CASE("relative pose") {
  std::mt19937_64 rng(4);
  const Pose p = randomPose(rng);
  CHECK(approxEqual(relativePose(p, p), Pose::identity()));
  CHECK(approxEqual(relativePose(Pose::identity(), p), p));
  const Pose from = composePose(Pose::translation(1, 0, 0), Pose::rotationZ(90));
  CHECK(matrixNear(pureMatrix(relativePose(from, Pose::identity())), pureMatrix(from).inverse()));
  for (int i = 0; i < 1000; ++i) {
    const Pose a = randomPose(rng), b = randomPose(rng);
    CHECK(approxEqual(composePose(a, relativePose(a, b)), b));
  }
}

TEST_CASE("distance and angle") {
  CHECK(positionDistance(Pose::identity(), Pose::translation(3, 4, 0)) == doctest::Approx(5.0));
  std::mt19937_64 rng(5);
  const Pose p = randomPose(rng);
  const Pose negated(p.position(), Eigen::Quaterniond(-p.orientation().coeffs()));
  CHECK(orientationAngle(p, p) == doctest::Approx(0.0));
  CHECK(orientationAngle(p, negated) < 1e-9);
  CHECK(orientationAngle(Pose::identity(), Pose::rotationZ(90)) == doctest::Approx(90.0));
  CHECK(orientationAngle(Pose::identity(), Pose::rotationZ(180)) == doctest::Approx(180.0));
}

TEST_CASE("angle is a metric on random triples") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 1000; ++i) {
    const Pose a = randomPose(rng), b = randomPose(rng), c = randomPose(rng);
    const double ab = orientationAngle(a, b);
    CHECK(ab >= 0.0);
    CHECK(ab <= 180.0 + 1e-12);
    CHECK(ab == doctest::Approx(orientationAngle(b, a)).epsilon(1e-12));
    CHECK(orientationAngle(a, c) <= ab + orientationAngle(b, c) + 1e-9);
  }
}

TEST_CASE("small angles stay accurate") {
  const Pose a = Pose::identity();
  const Pose b = Pose::rotationZ(1e-7);
  CHECK(orientationAngle(a, b) == doctest::Approx(1e-7).epsilon(1e-6));
}

TEST_CASE("matrix and array round trips") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Pose p = randomPose(rng);
    CHECK(approxEqual(Pose::fromMatrix(p.matrix()), p));
    const Pose q = Pose::fromArray(p.toArray());
    CHECK(q.toArray() == p.toArray());
    CHECK(std::abs(p.orientation().norm() - 1.0) < 1e-9);
  }
}

TEST_CASE("construction normalizes the quaternion") {
  const Pose p(Eigen::Vector3d::Zero(), Eigen::Quaterniond(2, 0, 0, 0));
  CHECK(p.orientation().norm() == doctest::Approx(1.0));
  CHECK(approxEqual(p, Pose::identity()));
}
