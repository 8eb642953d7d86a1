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

#include <chrono>
#include <numeric>

namespace ismtree {

double numFPs(const IsmTree& tree, const TestSet& testSet, const RecognitionParams& params) {
  std::size_t invalid = 0;
  std::size_t falsePositives = 0;
  for (const LabeledConfiguration& configuration : testSet) {
    if (configuration.valid) continue;
    ++invalid;
    if (!recognizeScene(configuration.objects, tree, params).empty()) ++falsePositives;
  }
  if (invalid == 0) {
    throw DomainError("EmptyTestSet", "test set contains no invalid configuration");
  }
  return 100.0 * static_cast<double>(falsePositives) / static_cast<double>(invalid);
}

double avgDur(const IsmTree& tree, const TestSet& testSet, const RecognitionParams& params) {
  if (testSet.empty()) throw DomainError("EmptyTestSet", "empty test set");
  for (std::size_t warmup = 0; warmup < 2; ++warmup) {
    recognizeScene(testSet[warmup % testSet.size()].objects, tree, params);
  }
  using Clock = std::chrono::steady_clock;
  double total = 0;
  for (const LabeledConfiguration& configuration : testSet) {
    const auto start = Clock::now();
    const auto instances = recognizeScene(configuration.objects, tree, params);
    total += std::chrono::duration<double>(Clock::now() - start).count();
    (void)instances;
  }
  return total / static_cast<double>(testSet.size());
}

double avgWork(const IsmTree& tree, const TestSet& testSet, const RecognitionParams& params) {
  if (testSet.empty()) throw DomainError("EmptyTestSet", "empty test set");
  double total = 0;
  for (const LabeledConfiguration& configuration : testSet) {
    RecognitionStats stats;
    recognizeScene(configuration.objects, tree, params, &stats);
    total += static_cast<double>(stats.voteEvaluations + stats.candidates);
  }
  return total / static_cast<double>(testSet.size());
}

double linearFitR2(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DomainError("InvalidParams", "linear fit needs two or more paired samples");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw DomainError("InvalidParams", "x values are all equal");
  if (syy == 0) return 1.0;
  return (sxy * sxy) / (sxx * syy);
}

}  // namespace ismtree
