// Copyright 2026 The DPCrowd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dynamic grouping of sampled dimensions. Dimensions whose predicted value
// is large are perturbed alone; small dimensions with similar level and
// trend are merged so that one Laplace draw covers their sum, which is then
// shared evenly among the members.

#ifndef DPCROWD_GROUPING_H_
#define DPCROWD_GROUPING_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpcrowd/privacy.h"

namespace dpcrowd {

struct GroupingThresholds {
  // Predictions at or above this stay in their own group.
  double large = 1.0;
  // Maximum trend deviation between merged dimensions.
  double deviation = 0.5;
  // Maximum level difference between merged dimensions.
  double similarity = 0.5;
  // Number of published values used for prediction and trend comparison.
  int history_window = 3;
};

// large = 2 sqrt(2) sensitivity / average_epsilon (the Laplace noise
// standard deviation scaled by 2), similarity = large / 2, deviation = 0.5,
// history window 3.
GroupingThresholds DefaultThresholds(double sensitivity, double average_epsilon);

// Mean of the last `tau` values of `history`, padding with the earliest
// value when the history is shorter. Empty history predicts 0.
double PredictRegion(std::span<const double> history, int tau);

// Mean absolute difference of the two tau-length histories after min-max
// normalisation (a constant history normalises to all zeros).
double TrendDeviation(std::span<const double> a, std::span<const double> b,
                      int tau);

struct GroupPartition {
  // Each group lists dimension indices in ascending order; groups are
  // ordered by their smallest index.
  std::vector<std::vector<int>> groups;
};

GroupPartition Singletons(std::span<const int> sampling_set);

// Deterministic grouping of `sampling_set`:
//  1. every k with predictions[k] >= large, or with no published history
//     yet, is a singleton;
//  2. the rest are visited in ascending (prediction, index) order; the
//     smallest unvisited one seeds a group and absorbs every other
//     unvisited j with |pred_j - pred_seed| <= similarity and
//     TrendDeviation <= deviation.
// `predictions` and `histories` are indexed by dimension.
GroupPartition GroupRegions(std::span<const int> sampling_set,
                            std::span<const double> predictions,
                            std::span<const std::vector<double>> histories,
                            const GroupingThresholds& thresholds);

// Groups must be non-empty, pairwise disjoint and cover `sampling_set`.
absl::Status ValidatePartition(const GroupPartition& partition,
                               std::span<const int> sampling_set);

// Perturbs every group sum with Laplace(sensitivity / min member budget) and
// gives each member the noisy sum divided by the group size. Every member's
// ledger is charged with its own budget; if any charge would be rejected, or
// any member budget is not positive, nothing is charged and an error is
// returned. The result has one entry per dimension of `raw`, empty for
// dimensions outside the partition.
absl::StatusOr<std::vector<std::optional<double>>> PerturbGroups(
    const GroupPartition& partition, RawAggregate&& raw,
    std::span<const double> budgets, double sensitivity, PrivacyLedger& ledger,
    int64_t t, const NoiseSource& noise);

}  // namespace dpcrowd

#endif  // DPCROWD_GROUPING_H_
