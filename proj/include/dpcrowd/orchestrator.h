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

// End-to-end estimation drivers: the non-private filter, DPCrowd, DPCrowd+
// and the FAST, DFAST and windowed DPCrowd baselines.

#ifndef DPCROWD_ORCHESTRATOR_H_
#define DPCROWD_ORCHESTRATOR_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpcrowd/config.h"
#include "dpcrowd/core_model.h"
#include "dpcrowd/netsim.h"
#include "dpcrowd/privacy.h"

namespace dpcrowd {

// True statistics plus the process model the servers filter with.
struct Scenario {
  StreamPrefix truth;
  ProcessModel model;
};

// Generates or loads the data described by `config` and applies the sparse
// rescaling. The model is transformed along with the data so that it stays
// exact for the rescaled stream.
absl::StatusOr<Scenario> BuildScenario(const ExperimentConfig& config);

struct TimestampTrace {
  int64_t packets = 0;
  int64_t bytes = 0;
  double latency_ms = 0.0;
  // Servers that broadcast a one-hop message, ascending.
  std::vector<int> broadcasters;
  // Degree of every server in the topology used at this timestamp.
  std::vector<int> degrees;
};

class RunResult {
 public:
  RunResult(Algorithm algorithm, int servers, int64_t length, int dim);

  Algorithm algorithm() const { return algorithm_; }
  int servers() const { return servers_; }
  int64_t length() const { return length_; }
  int dim() const { return dim_; }

  // Timestamps run from 1 to length().
  double estimate(int i, int64_t t, int k) const { return estimates_[Index(i, t, k)]; }
  double& estimate(int i, int64_t t, int k) { return estimates_[Index(i, t, k)]; }
  // Sanitized measurement used at (i, t, k); NaN when none was taken.
  double measurement(int i, int64_t t, int k) const {
    return measurements_[Index(i, t, k)];
  }
  double& measurement(int i, int64_t t, int k) {
    return measurements_[Index(i, t, k)];
  }
  // Filter posterior error variance M.
  double posterior_variance(int i, int64_t t, int k) const {
    return posterior_variance_[Index(i, t, k)];
  }
  double& posterior_variance(int i, int64_t t, int k) {
    return posterior_variance_[Index(i, t, k)];
  }
  double truth(int64_t t, int k) const { return truth_[(t - 1) * dim_ + k]; }

  // Flat [server][timestamp][dimension] releases and [timestamp][dimension]
  // truth.
  std::span<const double> estimates() const { return estimates_; }
  std::span<const double> truth() const { return truth_; }
  void set_truth(std::vector<double> truth) { truth_ = std::move(truth); }

  std::vector<double>& observation_coefficients() { return coefficients_; }
  const std::vector<double>& observation_coefficients() const { return coefficients_; }

  CommStats& comm() { return comm_; }
  const CommStats& comm() const { return comm_; }
  std::vector<TimestampTrace>& trace() { return trace_; }
  const std::vector<TimestampTrace>& trace() const { return trace_; }
  // Final ledger of every server; empty for the non-private run.
  std::vector<PrivacyLedger>& ledgers() { return ledgers_; }
  const std::vector<PrivacyLedger>& ledgers() const { return ledgers_; }

 private:
  size_t Index(int i, int64_t t, int k) const {
    return (static_cast<size_t>(i) * length_ + (t - 1)) * dim_ + k;
  }

  Algorithm algorithm_;
  int servers_;
  int64_t length_;
  int dim_;
  std::vector<double> estimates_;
  std::vector<double> measurements_;
  std::vector<double> posterior_variance_;
  std::vector<double> truth_;
  std::vector<double> coefficients_;
  CommStats comm_;
  std::vector<TimestampTrace> trace_;
  std::vector<PrivacyLedger> ledgers_;
};

// Dispatches on config.algorithm.
absl::StatusOr<RunResult> Run(const ExperimentConfig& config);
absl::StatusOr<RunResult> Run(const ExperimentConfig& config,
                              const Scenario& scenario);

absl::StatusOr<RunResult> RunNonPrivate(const ExperimentConfig& config,
                                        const Scenario& scenario);
absl::StatusOr<RunResult> RunDpCrowd(const ExperimentConfig& config,
                                     const Scenario& scenario);
absl::StatusOr<RunResult> RunDpCrowdPlus(const ExperimentConfig& config,
                                         const Scenario& scenario);
absl::StatusOr<RunResult> RunFast(const ExperimentConfig& config,
                                  const Scenario& scenario);
absl::StatusOr<RunResult> RunDfast(const ExperimentConfig& config,
                                   const Scenario& scenario);
absl::StatusOr<RunResult> RunDpCrowdW(const ExperimentConfig& config,
                                      const Scenario& scenario);

// Maximum number of sampling points: floor(fraction * length), at least 1.
int64_t SampleCap(double fraction, int64_t length);

}  // namespace dpcrowd

#endif  // DPCROWD_ORCHESTRATOR_H_
