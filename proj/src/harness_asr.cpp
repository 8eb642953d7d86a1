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
#include <limits>
#include <map>
#include <random>
#include <set>

namespace ismtree {

void SimWorld::validate() const {
  if (!(camera.fovDeg > 0 && camera.fovDeg < 180)) {
    throw DomainError("InvalidWorld", "field of view must lie in (0, 180) degrees");
  }
  if (!(camera.minRange > 0 && camera.maxRange > camera.minRange)) {
    throw DomainError("InvalidWorld", "camera ranges must be positive and ordered");
  }
  if (noisePosition < 0 || noiseOrientationDeg < 0) {
    throw DomainError("InvalidWorld", "detection noise must be non-negative");
  }
  if (!(workspace.min.x() < workspace.max.x() && workspace.min.y() < workspace.max.y())) {
    throw DomainError("InvalidWorld", "empty workspace");
  }
}

namespace {

double wrapAngle(double radians) {
  return std::remainder(radians, 2.0 * EIGEN_PI);
}

double travelCost(const View& from, const View& to, double turnWeight) {
  return (to.position - from.position).norm() + turnWeight * std::abs(wrapAngle(to.yaw - from.yaw));
}

View lookingAt(const Eigen::Vector2d& position, const Eigen::Vector2d& target) {
  const Eigen::Vector2d d = target - position;
  return View{position, std::atan2(d.y(), d.x())};
}

struct Evidence {
  Eigen::Vector3d point;
  double mass;
};

class Simulation {
 public:
  Simulation(const SimWorld& world, const std::vector<IsmTree>& trees, const AsrParams& params)
      : world_(world), trees_(trees), params_(params), rng_(params.seed), current_(world.robot) {
    for (const IsmTree& tree : trees_) {
      for (const ObjectId& id : tree.realObjects()) category_.insert(id);
    }
    buildSweep();
    buildInformed();
    log_.viewCap = informed_.size() + sweep_.size() + params_.noProgressLimit * category_.size();
  }

  AsrLog run() {
    bool indirect = false;
    std::size_t noProgress = 0;
    while (!allFound() && log_.adoptedViews < log_.viewCap) {
      if (!indirect) {
        const std::optional<View> view = nextDirectView();
        if (!view) break;
        const std::size_t fresh = adopt(*view, AsrState::DirectSearch, "");
        if (fresh > 0 && params_.usePrediction) {
          indirect = true;
          noProgress = 0;
        }
        continue;
      }

      const auto instances = recognize(AsrState::SceneRecognition);
      if (allFound()) break;
      const std::vector<Evidence> evidence = predict(instances);
      if (evidence.empty()) {
        indirect = false;
        continue;
      }
      const std::optional<View> view = bestScoredView(evidence);
      if (!view) {
        indirect = false;
        continue;
      }
      const std::size_t fresh = adopt(*view, AsrState::RelationBasedSearch, "");
      noProgress = fresh > 0 ? 0 : noProgress + 1;
      if (noProgress >= params_.noProgressLimit) {
        indirect = false;
        noProgress = 0;
      }
    }
    if (allFound()) recognize(AsrState::SceneRecognition);
    finish();
    return log_;
  }

 private:
  void buildSweep() {
    const Box2d& ws = world_.workspace;
    const std::size_t yaws = std::max<std::size_t>(1, params_.sweepYaws);
    for (double x = ws.min.x() + params_.sweepStep / 2; x <= ws.max.x(); x += params_.sweepStep) {
      for (double y = ws.min.y() + params_.sweepStep / 2; y <= ws.max.y();
           y += params_.sweepStep) {
        for (std::size_t k = 0; k < yaws; ++k) {
          sweep_.push_back(View{Eigen::Vector2d(x, y),
                                wrapAngle(2.0 * EIGEN_PI * static_cast<double>(k) /
                                          static_cast<double>(yaws))});
        }
      }
    }
    sweepUsed_.assign(sweep_.size(), false);
  }

  void buildInformed() {
    const double standoff = (world_.camera.minRange + world_.camera.maxRange) / 2.0;
    for (const Eigen::Vector3d& hint : params_.hints) {
      const Eigen::Vector2d target = hint.head<2>();
      Eigen::Vector2d away = world_.robot.position - target;
      if (away.norm() < 1e-9) away = Eigen::Vector2d(-1, 0);
      informed_.push_back(lookingAt(target + standoff * away.normalized(), target));
    }
  }

  bool allFound() const {
    for (const ObjectId& id : category_) {
      if (!detected_.contains(id)) return false;
    }
    return true;
  }

  std::optional<View> nextDirectView() {
    if (nextInformed_ < informed_.size()) return informed_[nextInformed_++];
    if (!params_.usePrediction && !params_.searchBoxes.empty()) {
      if (auto view = bestScoredView(boxEvidence())) return view;
    }
    std::size_t best = sweep_.size();
    double bestCost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sweep_.size(); ++i) {
      if (sweepUsed_[i]) continue;
      const double cost = travelCost(current_, sweep_[i], params_.turnWeight);
      if (cost < bestCost) {
        bestCost = cost;
        best = i;
      }
    }
    if (best == sweep_.size()) return std::nullopt;
    sweepUsed_[best] = true;
    return sweep_[best];
  }

  std::vector<Evidence> boxEvidence() const {
    std::vector<Evidence> evidence;
    for (const Box2d& box : params_.searchBoxes) {
      std::vector<Eigen::Vector3d> points;
      for (double x = box.min.x(); x <= box.max.x() + 1e-12; x += params_.boxSampleStep) {
        for (double y = box.min.y(); y <= box.max.y() + 1e-12; y += params_.boxSampleStep) {
          points.emplace_back(x, y, 0.0);
        }
      }
      for (const Eigen::Vector3d& p : points) {
        evidence.push_back(Evidence{p, 1.0 / static_cast<double>(points.size())});
      }
    }
    return evidence;
  }

  bool seenBefore(const Eigen::Vector3d& point) const {
    for (const View& view : adopted_) {
      if (inFrustum(view, world_.camera, point)) return true;
    }
    return false;
  }

  std::optional<View> bestScoredView(const std::vector<Evidence>& evidence) {
    std::vector<Evidence> open;
    for (const Evidence& e : evidence) {
      if (!seenBefore(e.point)) open.push_back(e);
    }
    if (open.empty()) return std::nullopt;

    // Candidate views: a polar grid around each cluster centroid plus the sweep grid.
    std::vector<View> candidates;
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (const Evidence& e : open) sum += e.point;
    std::vector<Eigen::Vector2d> centers{(sum / static_cast<double>(open.size())).head<2>()};
    for (const Evidence& e : open) {
      bool near = false;
      for (const Eigen::Vector2d& c : centers) near = near || (e.point.head<2>() - c).norm() < 0.5;
      if (!near) centers.push_back(e.point.head<2>());
    }
    const Box2d& ws = world_.workspace;
    for (const Eigen::Vector2d& c : centers) {
      for (double radius : params_.viewRadii) {
        for (std::size_t k = 0; k < params_.viewAngles; ++k) {
          const double a = 2.0 * EIGEN_PI * static_cast<double>(k) /
                           static_cast<double>(params_.viewAngles);
          const Eigen::Vector2d p = c + radius * Eigen::Vector2d(std::cos(a), std::sin(a));
          if (p.x() < ws.min.x() || p.x() > ws.max.x() || p.y() < ws.min.y() ||
              p.y() > ws.max.y()) {
            continue;
          }
          candidates.push_back(lookingAt(p, c));
        }
      }
    }
    candidates.insert(candidates.end(), sweep_.begin(), sweep_.end());

    std::optional<View> best;
    double bestUtility = -std::numeric_limits<double>::infinity();
    for (const View& view : candidates) {
      double mass = 0;
      for (const Evidence& e : open) {
        if (inFrustum(view, world_.camera, e.point)) mass += e.mass;
      }
      if (mass <= 0) continue;
      const double utility =
          mass - params_.travelWeight * travelCost(current_, view, params_.turnWeight);
      if (utility > bestUtility) {
        bestUtility = utility;
        best = view;
      }
    }
    return best;
  }

  ObjectState observe(const ObjectState& truth) {
    ObjectState state = truth;
    state.isPlaceholder = false;
    state.confidence = 1.0;
    Eigen::Vector3d position = truth.pose.position();
    Eigen::Quaterniond orientation = truth.pose.orientation();
    if (world_.noisePosition > 0) {
      std::normal_distribution<double> normal(0.0, world_.noisePosition);
      position += Eigen::Vector3d(normal(rng_), normal(rng_), normal(rng_));
    }
    if (world_.noiseOrientationDeg > 0) {
      std::normal_distribution<double> normal(0.0, degToRad(world_.noiseOrientationDeg));
      const Eigen::Vector3d axis =
          Eigen::Vector3d(normal(rng_), normal(rng_), normal(rng_)).normalized();
      orientation = orientation * Eigen::Quaterniond(Eigen::AngleAxisd(normal(rng_), axis));
    }
    state.pose = Pose(position, orientation);
    return state;
  }

  std::size_t adopt(const View& view, AsrState state, const std::string& note) {
    log_.totalCost += travelCost(current_, view, params_.turnWeight);
    current_ = view;
    adopted_.push_back(view);
    ++log_.adoptedViews;

    AsrLogEntry entry{state, view, {}, log_.totalCost, note};
    for (const ObjectState& truth : world_.objects) {
      if (!inFrustum(view, world_.camera, truth.pose.position())) continue;
      if (detected_.contains(truth.id) || clutterSeen_.contains(truth.id)) continue;
      if (category_.contains(truth.id)) {
        detected_.emplace(truth.id, observe(truth));
        entry.detected.push_back(truth.id);
      } else {
        clutterSeen_.emplace(truth.id, observe(truth));
      }
    }
    for (const ObjectState& truth : world_.clutter) {
      if (inFrustum(view, world_.camera, truth.pose.position()) &&
          !clutterSeen_.contains(truth.id)) {
        clutterSeen_.emplace(truth.id, observe(truth));
      }
    }
    const std::size_t fresh = entry.detected.size();
    log_.entries.push_back(std::move(entry));
    return fresh;
  }

  std::vector<ObjectState> observations() const {
    std::vector<ObjectState> states;
    for (const auto& [id, state] : detected_) states.push_back(state);
    for (const auto& [id, state] : clutterSeen_) states.push_back(state);
    return states;
  }

  std::vector<std::pair<const IsmTree*, SceneInstance>> recognize(AsrState state) {
    log_.entries.push_back(AsrLogEntry{state, std::nullopt, {}, log_.totalCost, ""});
    const std::vector<ObjectState> states = observations();
    std::vector<std::pair<const IsmTree*, SceneInstance>> best;
    for (const IsmTree& tree : trees_) {
      const auto instances = recognizeScene(states, tree, params_.recognition);
      if (instances.empty()) continue;
      best.emplace_back(&tree, instances.front());
    }
    log_.entries.back().note = std::to_string(best.size()) + " instance(s)";
    return best;
  }

  std::vector<Evidence> predict(const std::vector<std::pair<const IsmTree*, SceneInstance>>& found) {
    log_.entries.push_back(
        AsrLogEntry{AsrState::ObjectPosePrediction, std::nullopt, {}, log_.totalCost, ""});
    std::vector<Evidence> evidence;
    const double nP = static_cast<double>(params_.predictionsPerObject);
    for (const auto& [tree, instance] : found) {
      const PathTable paths = computeShortestPaths(*tree);
      const PredictionCloud cloud = generateCloudOfPosePredictions(
          instance, *tree, paths, params_.predictionsPerObject, rng_);
      for (const auto& [id, poses] : cloud) {
        if (detected_.contains(id)) continue;
        for (const Pose& pose : poses) {
          evidence.push_back(Evidence{pose.position(), instance.confidence / nP});
        }
      }
    }
    log_.entries.back().note = std::to_string(evidence.size()) + " predicted pose(s)";
    return evidence;
  }

  void finish() {
    const std::vector<ObjectState> states = observations();
    for (const IsmTree& tree : trees_) {
      for (const SceneInstance& instance : recognizeScene(states, tree, params_.recognition)) {
        AsrInstanceSummary summary{tree.categoryLabel, instance.confidence, instance.pose, {}};
        for (const ObjectState& s : instance.realParticipants()) summary.objects.push_back(s.id);
        log_.instances.push_back(std::move(summary));
        break;
      }
    }
    for (const auto& [id, state] : detected_) log_.found.push_back(id);
    log_.allFound = allFound();
  }

  const SimWorld& world_;
  const std::vector<IsmTree>& trees_;
  const AsrParams& params_;
  std::mt19937_64 rng_;
  View current_;
  std::set<ObjectId> category_;
  std::vector<View> sweep_;
  std::vector<bool> sweepUsed_;
  std::vector<View> informed_;
  std::size_t nextInformed_ = 0;
  std::vector<View> adopted_;
  std::map<ObjectId, ObjectState> detected_;
  std::map<ObjectId, ObjectState> clutterSeen_;
  AsrLog log_;
};

}  // namespace

bool inFrustum(const View& view, const CameraModel& camera, const Eigen::Vector3d& point) {
  const Eigen::Vector2d d = point.head<2>() - view.position;
  const double range = d.norm();
  if (range < camera.minRange || range > camera.maxRange) return false;
  const double bearing = wrapAngle(std::atan2(d.y(), d.x()) - view.yaw);
  return std::abs(bearing) <= degToRad(camera.fovDeg) / 2.0;
}

std::string toString(AsrState state) {
  switch (state) {
    case AsrState::DirectSearch:
      return "DIRECT_SEARCH";
    case AsrState::SceneRecognition:
      return "SCENE_RECOGNITION";
    case AsrState::ObjectPosePrediction:
      return "OBJECT_POSE_PREDICTION";
    case AsrState::RelationBasedSearch:
      return "RELATION_BASED_SEARCH";
  }
  return "DIRECT_SEARCH";
}

AsrState asrStateFromString(const std::string& text) {
  for (AsrState s : {AsrState::DirectSearch, AsrState::SceneRecognition,
                     AsrState::ObjectPosePrediction, AsrState::RelationBasedSearch}) {
    if (toString(s) == text) return s;
  }
  throw DomainError("InvalidLog", "unknown ASR state " + text);
}

AsrLog runAsrSimulation(const SimWorld& world, const std::vector<IsmTree>& trees,
                        const AsrParams& params) {
  world.validate();
  if (trees.empty()) throw DomainError("InvalidParams", "at least one ISM tree is required");
  params.recognition.validate();
  if (params.sweepStep <= 0 || params.viewAngles == 0 || params.predictionsPerObject == 0 ||
      params.noProgressLimit == 0 || params.boxSampleStep <= 0) {
    throw DomainError("InvalidParams", "ASR grid parameters must be positive");
  }
  return Simulation(world, trees, params).run();
}

}  // namespace ismtree
