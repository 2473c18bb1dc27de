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

// Synthetic stream generators and CSV ingestion.

#ifndef DPCROWD_DATASETS_H_
#define DPCROWD_DATASETS_H_

#include <cstdint>
#include <span>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dpcrowd/core_model.h"
#include "dpcrowd/random.h"

namespace dpcrowd {

inline constexpr double kLinearVariance = 1e5;
inline constexpr double kLinearInitial = 1e5;
inline constexpr int64_t kDefaultLength = 1000;
inline constexpr int kMultiLinearDim = 6;
inline constexpr double kMultiLinearVariance = 1e3;
inline constexpr double kMultiLinearInitial = 1e4;

// Runs the process from `initial` for `length` timestamps, clamping every
// value at zero. Row 0 is `initial` itself.
absl::StatusOr<StreamPrefix> GenerateProcess(const ProcessModel& model,
                                             std::span<const double> initial,
                                             int64_t length, Rng& rng);

// One-dimensional random walk: A = 1, Q = `variance`.
absl::StatusOr<StreamPrefix> GenerateLinear(int64_t length, double variance,
                                            double initial, Rng& rng);

// Default six-dimensional model: 0.8 on the diagonal and 0.04 elsewhere, so
// every row sums to one, with Q = 1e3 I.
ProcessModel DefaultMultiLinearModel();

absl::StatusOr<StreamPrefix> GenerateMultiLinear(const ProcessModel& model,
                                                 int64_t length, double initial,
                                                 Rng& rng);

// Parses comma-separated rows, one per timestamp. A first row that is not
// numeric is taken as a header. Values must be finite and non-negative.
absl::StatusOr<StreamPrefix> ParseCsv(absl::string_view text);
absl::StatusOr<StreamPrefix> LoadCsv(const std::string& path);

// Writes `stream` as CSV with a header r0,r1,...
absl::Status WriteCsv(const StreamPrefix& stream, const std::string& path);

}  // namespace dpcrowd

#endif  // DPCROWD_DATASETS_H_
