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

// Utility and consensus metrics over released estimates.

#ifndef DPCROWD_METRICS_H_
#define DPCROWD_METRICS_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "dpcrowd/config.h"
#include "dpcrowd/orchestrator.h"

namespace dpcrowd {

// Shape of a [server][timestamp][dimension] estimate tensor.
struct EstimateShape {
  int servers = 0;
  int64_t length = 0;
  int dim = 0;
};

// Per-timestamp mean over servers and dimensions of
// |x_i^k(t) - r^k(t)| / max(r^k(t), delta).
absl::StatusOr<std::vector<double>> RelativeErrorTrace(
    std::span<const double> estimates, std::span<const double> truth,
    EstimateShape shape, double delta = 1.0);

// Per-timestamp mean over servers and dimensions of the absolute deviation
// from the cross-server mean.
absl::StatusOr<std::vector<double>> ConsensusErrorTrace(
    std::span<const double> estimates, EstimateShape shape);

// Average relative error: the mean of RelativeErrorTrace.
absl::StatusOr<double> ComputeAre(std::span<const double> estimates,
                                  std::span<const double> truth,
                                  EstimateShape shape, double delta = 1.0);

// Average consensus error: the mean of ConsensusErrorTrace.
absl::StatusOr<double> ComputeAce(std::span<const double> estimates,
                                  EstimateShape shape);

struct MetricsReport {
  std::string algorithm;
  uint64_t seed = 0;
  double epsilon = 0.0;
  int w = 0;
  double rho = 0.0;
  int m = 0;
  double are = 0.0;
  double ace = 0.0;
  // Communication totals. Averages when runs > 1.
  double packets = 0.0;
  double bytes = 0.0;
  double max_latency_ms = 0.0;
  double broadcasts = 0.0;
  int64_t runs = 1;
  std::vector<double> relative_error_trace;
  std::vector<double> consensus_error_trace;
  std::vector<double> packets_trace;
  std::vector<std::pair<std::string, std::string>> config;
};

absl::StatusOr<MetricsReport> Summarize(const ExperimentConfig& config,
                                        const RunResult& result);

// Field-wise mean of several runs of one setting. Traces are averaged
// timestamp by timestamp; the config echo and seed come from the first run.
absl::StatusOr<MetricsReport> Average(std::span<const MetricsReport> runs);

}  // namespace dpcrowd

#endif  // DPCROWD_METRICS_H_
