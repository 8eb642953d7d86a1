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

#include "ismtree/ism_core.hpp"

#include "ismtree/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

namespace ismtree {

ObjectId ObjectId::parse(const std::string& text) {
  const auto slash = text.rfind('/');
  if (slash == std::string::npos) return ObjectId{text, "0"};
  return ObjectId{text.substr(0, slash), text.substr(slash + 1)};
}

std::size_t DemonstrationDataset::length() const {
  return trajectories.empty() ? 0 : trajectories.begin()->second.length();
}

std::vector<ObjectId> DemonstrationDataset::objects() const {
  std::vector<ObjectId> ids;
  ids.reserve(trajectories.size());
  for (const auto& [id, trajectory] : trajectories) ids.push_back(id);
  return ids;
}

std::vector<ObjectState> DemonstrationDataset::configurationAt(std::size_t timestep) const {
  std::vector<ObjectState> states;
  for (const auto& [id, trajectory] : trajectories) {
    states.push_back(ObjectState{id, trajectory.poses.at(timestep), false, 1.0, ResultToken{}});
  }
  return states;
}

void DemonstrationDataset::validate() const {
  if (trajectories.size() < 2) {
    throw DomainError("InvalidDataset", "a demonstration needs at least two objects");
  }
  const std::size_t l = length();
  if (l == 0) throw DomainError("InvalidDataset", "empty trajectories");
  for (const auto& [id, trajectory] : trajectories) {
    if (trajectory.objectId != id) {
      throw DomainError("InvalidDataset", "trajectory key does not match its object id " + id.str());
    }
    if (trajectory.length() != l) {
      throw DomainError("LengthMismatch", "trajectory of " + id.str() + " has length " +
                                              std::to_string(trajectory.length()) + ", expected " +
                                              std::to_string(l));
    }
  }
}

int SingleIsm::totalWeight() const {
  int total = 0;
  for (const auto& [id, weight] : weightTable) total += weight;
  return total;
}

int SingleIsm::weightOf(const ObjectId& id) const {
  const auto it = weightTable.find(id);
  return it == weightTable.end() ? 0 : it->second;
}

std::size_t SingleIsm::sampleCount() const {
  std::size_t count = 0;
  for (const auto& [id, samples] : voteTable) count += samples.size();
  return count;
}

LearnedIsm learnSingleIsm(const std::string& label, const Trajectory& center,
                          std::span<const Trajectory> neighbors,
                          const std::map<ObjectId, int>& inputWeights) {
  if (neighbors.empty()) {
    throw DomainError("EmptyNeighborhood", "ISM " + label + " has no neighbors");
  }
  const std::size_t l = center.length();
  if (l == 0) throw DomainError("LengthMismatch", "empty center trajectory");

  auto weightFor = [&](const ObjectId& id) {
    const auto it = inputWeights.find(id);
    return it == inputWeights.end() ? 1 : it->second;
  };

  LearnedIsm learned;
  SingleIsm& ism = learned.ism;
  ism.label = label;
  ism.referenceId = placeholderIdFor(label);

  std::vector<RelativePoseSample>& own = ism.voteTable[center.objectId];
  for (std::size_t t = 0; t < l; ++t) {
    own.push_back(RelativePoseSample{static_cast<int>(t + 1), Pose::identity(), Pose::identity()});
  }
  ism.weightTable[center.objectId] = weightFor(center.objectId);

  for (const Trajectory& neighbor : neighbors) {
    if (neighbor.length() != l) {
      throw DomainError("LengthMismatch", "trajectory of " + neighbor.objectId.str() +
                                              " differs in length from the center's");
    }
    if (neighbor.objectId == center.objectId) {
      throw DomainError("InvalidStar", "center " + center.objectId.str() + " listed as neighbor");
    }
    if (ism.voteTable.contains(neighbor.objectId)) {
      throw DomainError("InvalidStar", "duplicate neighbor " + neighbor.objectId.str());
    }
    std::vector<RelativePoseSample>& samples = ism.voteTable[neighbor.objectId];
    samples.reserve(l);
    for (std::size_t t = 0; t < l; ++t) {
      const Pose vote = relativePose(neighbor.poses[t], center.poses[t]);
      samples.push_back(RelativePoseSample{static_cast<int>(t + 1), vote, invertPose(vote)});
    }
    ism.weightTable[neighbor.objectId] = weightFor(neighbor.objectId);
  }

  learned.referenceTrajectory = Trajectory{ism.referenceId, center.poses};
  return learned;
}

void RecognitionParams::validate() const {
  if (!(binSize > 0)) throw DomainError("InvalidParams", "bin size must be positive");
  if (!(positionTolerance > 0)) {
    throw DomainError("InvalidParams", "position tolerance must be positive");
  }
  if (!(orientationToleranceDeg > 0 && orientationToleranceDeg <= 180)) {
    throw DomainError("InvalidParams", "orientation tolerance must lie in (0, 180] degrees");
  }
  if (!(resultKeepThreshold >= 0 && resultKeepThreshold <= 1)) {
    throw DomainError("InvalidParams", "result keep threshold must lie in [0, 1]");
  }
  if (!(assemblyThreshold >= 0 && assemblyThreshold <= 1)) {
    throw DomainError("InvalidParams", "assembly threshold must lie in [0, 1]");
  }
  if (maxResultsPassedUp == 0) {
    throw DomainError("InvalidParams", "at least one result must be passed between ISMs");
  }
}

double positionCompliance(const Eigen::Vector3d& expected, const Eigen::Vector3d& actual,
                          double tolerance) {
  return std::max(0.0, 1.0 - (expected - actual).norm() / tolerance);
}

double orientationCompliance(const Eigen::Quaterniond& expected, const Eigen::Quaterniond& actual,
                             double toleranceDeg) {
  return std::max(0.0, 1.0 - orientationAngle(expected, actual) / toleranceDeg);
}

namespace {

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::size_t h = static_cast<std::size_t>(k.x) * 73856093ULL;
    h ^= static_cast<std::size_t>(k.y) * 19349663ULL;
    h ^= static_cast<std::size_t>(k.z) * 83492791ULL;
    return h;
  }
};

CellKey cellOf(const Eigen::Vector3d& p, double binSize) {
  return CellKey{static_cast<std::int64_t>(std::floor(p.x() / binSize)),
                 static_cast<std::int64_t>(std::floor(p.y() / binSize)),
                 static_cast<std::int64_t>(std::floor(p.z() / binSize))};
}

// Objectives closer than this are ties, resolved by candidate order (slot, input, sample)
// rather than by rounding noise.
constexpr double kTieTolerance = 1e-9;

struct Vote {
  std::size_t input;
  std::size_t sample;
  Pose reference;
};

// Votes of all inputs sharing one ObjectId of the vote table, bucketed by voted position.
struct Slot {
  ObjectId id;
  double weight = 0;
  const std::vector<RelativePoseSample>* samples = nullptr;
  std::vector<Vote> votes;
  std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> cells;
  std::vector<CellKey> occupied;
  std::int64_t halfWidth = 1;
};

struct Match {
  std::size_t input = 0;
  std::size_t sample = 0;
  double score = 0;  // confidence * similarity
  double similarity = 0;
  double positionCompliance = 0;
  double orientationCompliance = 0;
};

struct Candidate {
  Pose reference;
  std::vector<std::pair<std::size_t, Match>> matches;  // (slot, match)
  double objective = 0;
};

bool betterMatch(const Match& a, const Match& b, std::span<const ObjectState> inputs) {
  if (a.score != b.score) return a.score > b.score;
  const double ca = inputs[a.input].confidence;
  const double cb = inputs[b.input].confidence;
  if (ca != cb) return ca > cb;
  if (a.input != b.input) return a.input < b.input;
  return a.sample < b.sample;
}

template <typename Visit>
void forEachVoteNear(const Slot& slot, const CellKey& center, Visit&& visit) {
  const std::int64_t h = slot.halfWidth;
  const std::size_t cube = static_cast<std::size_t>((2 * h + 1) * (2 * h + 1) * (2 * h + 1));
  if (cube <= slot.occupied.size()) {
    for (std::int64_t dx = -h; dx <= h; ++dx) {
      for (std::int64_t dy = -h; dy <= h; ++dy) {
        for (std::int64_t dz = -h; dz <= h; ++dz) {
          const auto it = slot.cells.find(CellKey{center.x + dx, center.y + dy, center.z + dz});
          if (it == slot.cells.end()) continue;
          for (std::size_t v : it->second) visit(v);
        }
      }
    }
    return;
  }
  for (const CellKey& key : slot.occupied) {
    if (std::abs(key.x - center.x) > h || std::abs(key.y - center.y) > h ||
        std::abs(key.z - center.z) > h) {
      continue;
    }
    for (std::size_t v : slot.cells.at(key)) visit(v);
  }
}

}  // namespace

std::vector<RecognitionResult> recognizeSingleIsm(std::span<const ObjectState> inputs,
                                                  const SingleIsm& ism,
                                                  const RecognitionParams& params) {
  ResultTokenSource tokens;
  return recognizeSingleIsm(inputs, ism, params, tokens);
}

std::vector<RecognitionResult> recognizeSingleIsm(std::span<const ObjectState> inputs,
                                                  const SingleIsm& ism,
                                                  const RecognitionParams& params,
                                                  ResultTokenSource& tokens,
                                                  RecognitionStats* stats) {
  params.validate();
  const double tau = params.positionTolerance;
  const double tauRot = params.orientationToleranceDeg;
  const double chord = 2.0 * std::sin(degToRad(tauRot) / 2.0);

  // Voting: every input with a table entry casts one vote per sample.
  std::vector<Slot> slots;
  for (const auto& [id, samples] : ism.voteTable) {
    Slot slot;
    slot.id = id;
    slot.weight = ism.weightOf(id);
    slot.samples = &samples;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (inputs[i].id != id) continue;
      for (std::size_t s = 0; s < samples.size(); ++s) {
        slot.votes.push_back(Vote{i, s, composePose(inputs[i].pose, samples[s].voteToReference)});
      }
    }
    if (slot.votes.empty()) continue;
    double lever = 0;
    for (const RelativePoseSample& sample : samples) {
      lever = std::max(lever, sample.backToObject.position().norm());
    }
    // A vote can only match a candidate whose position lies within this radius.
    const double radius = tau + chord * lever;
    slot.halfWidth = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(radius / params.binSize + 1e-9)));
    for (std::size_t v = 0; v < slot.votes.size(); ++v) {
      const CellKey key = cellOf(slot.votes[v].reference.position(), params.binSize);
      auto [it, inserted] = slot.cells.try_emplace(key);
      if (inserted) slot.occupied.push_back(key);
      it->second.push_back(v);
    }
    slots.push_back(std::move(slot));
  }

  RecognitionStats localStats;
  // Best candidate per distinct participant set (keyed by sorted input indices).
  std::map<std::vector<std::size_t>, Candidate> bestPerSet;

  std::vector<Pose> relative(inputs.size());
  std::vector<std::uint64_t> relativeStamp(inputs.size(), 0);
  std::uint64_t stamp = 0;

  for (const Slot& source : slots) {
    for (const Vote& vote : source.votes) {
      ++localStats.candidates;
      ++stamp;
      const Pose& reference = vote.reference;
      const CellKey centerCell = cellOf(reference.position(), params.binSize);

      Candidate candidate;
      candidate.reference = reference;
      for (std::size_t s = 0; s < slots.size(); ++s) {
        const Slot& slot = slots[s];
        Match best;
        bool found = false;
        forEachVoteNear(slot, centerCell, [&](std::size_t v) {
          ++localStats.voteEvaluations;
          const Vote& other = slot.votes[v];
          if (relativeStamp[other.input] != stamp) {
            relative[other.input] = relativePose(reference, inputs[other.input].pose);
            relativeStamp[other.input] = stamp;
          }
          const Pose& rel = relative[other.input];
          const Pose& back = (*slot.samples)[other.sample].backToObject;
          // Deviation of the expected object pose (reference * back) from the actual one,
          // measured in the reference frame where it reduces to back vs. rel.
          const double pc = positionCompliance(back.position(), rel.position(), tau);
          if (pc <= 0) return;
          const double oc = orientationCompliance(back.orientation(), rel.orientation(), tauRot);
          if (oc <= 0) return;
          Match match{other.input, other.sample, inputs[other.input].confidence * pc * oc,
                      pc * oc, pc, oc};
          if (!found || betterMatch(match, best, inputs)) {
            best = match;
            found = true;
          }
        });
        if (found) {
          candidate.objective += slot.weight * best.score;
          candidate.matches.emplace_back(s, best);
        }
      }
      if (candidate.matches.empty()) continue;

      std::vector<std::size_t> key;
      key.reserve(candidate.matches.size());
      for (const auto& [slot, match] : candidate.matches) key.push_back(match.input);
      std::sort(key.begin(), key.end());
      auto it = bestPerSet.find(key);
      if (it == bestPerSet.end()) {
        bestPerSet.emplace(std::move(key), std::move(candidate));
      } else if (candidate.objective > it->second.objective + kTieTolerance) {
        it->second = std::move(candidate);
      }
    }
  }

  // Drop results dominated by a superset of participants with at least the same objective.
  std::vector<std::pair<const std::vector<std::size_t>*, Candidate*>> ordered;
  for (auto& [key, candidate] : bestPerSet) ordered.emplace_back(&key, &candidate);
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    if (std::abs(a.second->objective - b.second->objective) > kTieTolerance) {
      return a.second->objective > b.second->objective;
    }
    return a.first->size() > b.first->size();
  });
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const auto& key = *ordered[i].first;
    const bool dominated = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      const auto& other = *ordered[k].first;
      return std::includes(other.begin(), other.end(), key.begin(), key.end());
    });
    if (!dominated) kept.push_back(i);
  }

  const double totalWeight = ism.totalWeight();
  std::vector<RecognitionResult> results;
  results.reserve(kept.size());
  for (std::size_t k : kept) {
    const Candidate& candidate = *ordered[k].second;
    RecognitionResult result;
    result.ismLabel = ism.label;
    result.referencePose = candidate.reference;
    result.objectiveValue = candidate.objective;
    result.confidence = totalWeight > 0 ? std::min(1.0, candidate.objective / totalWeight) : 0.0;
    for (const auto& [s, match] : candidate.matches) {
      Participant p;
      p.state = inputs[match.input];
      p.similarity = match.similarity;
      p.positionCompliance = match.positionCompliance;
      p.orientationCompliance = match.orientationCompliance;
      p.weight = slots[s].weight;
      p.contribution = p.weight * match.score;
      p.timestep = (*slots[s].samples)[match.sample].timestep;
      result.participants.push_back(std::move(p));
    }
    std::sort(result.participants.begin(), result.participants.end(),
              [](const Participant& a, const Participant& b) {
                if (a.state.id != b.state.id) return a.state.id < b.state.id;
                return a.state.token < b.state.token;
              });
    result.token = tokens.next();
    results.push_back(std::move(result));
  }

  if (stats) *stats += localStats;
  return results;
}

}  // namespace ismtree
