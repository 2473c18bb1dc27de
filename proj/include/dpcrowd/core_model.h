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

// Latent process, observation model, user partition and stream containers
// shared by every estimation algorithm.

#ifndef DPCROWD_CORE_MODEL_H_
#define DPCROWD_CORE_MODEL_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpcrowd/random.h"

namespace dpcrowd {

// Linear Gaussian process r(t+1) = A r(t) + w(t), w ~ N(0, diag(Q)).
class ProcessModel {
 public:
  // `transition` is row-major dim x dim; `noise_variance` is the diagonal of
  // Q. Fails on size mismatch, non-finite entries or negative variances.
  static absl::StatusOr<ProcessModel> Create(std::vector<double> transition,
                                             std::vector<double> noise_variance);
  static ProcessModel Scalar(double a, double q);

  int dim() const { return dim_; }
  double transition(int row, int col) const {
    return transition_[row * dim_ + col];
  }
  std::span<const double> transition() const { return transition_; }
  std::span<const double> noise_variance() const { return noise_variance_; }
  double noise_variance(int k) const { return noise_variance_[k]; }

  // A r, without noise.
  std::vector<double> Apply(std::span<const double> r) const;

  // True when A has no off-diagonal entries.
  bool IsDiagonal() const;

 private:
  ProcessModel(int dim, std::vector<double> transition,
               std::vector<double> noise_variance)
      : dim_(dim),
        transition_(std::move(transition)),
        noise_variance_(std::move(noise_variance)) {}

  int dim_;
  std::vector<double> transition_;
  std::vector<double> noise_variance_;
};

struct TrueState {
  int64_t t = 0;
  std::vector<double> r;
};

// Advances the latent statistics by one timestamp.
absl::StatusOr<TrueState> StepProcess(const ProcessModel& model,
                                      const TrueState& state, Rng& rng);

// Assigns each of `n` users to one of `m` servers uniformly at random and
// returns the group sizes |G_i|.
absl::StatusOr<std::vector<int64_t>> PartitionUsers(int64_t n, int m, Rng& rng);

// Per-server observation coefficients H_i = |G_i| / n over a public
// population n.
struct ObservationModel {
  int64_t population = 0;
  std::vector<double> coefficients;

  static absl::StatusOr<ObservationModel> FromGroupSizes(
      std::span<const int64_t> group_sizes);
};

// x = H r + v with v_k ~ N(0, H^2 Q_kk) drawn independently per dimension.
absl::StatusOr<std::vector<double>> Observe(double h, std::span<const double> r,
                                            std::span<const double> q_diag,
                                            Rng& rng);

// A T x d sequence of observations, indexed [t][k] with t starting at 0.
class StreamPrefix {
 public:
  StreamPrefix() = default;
  explicit StreamPrefix(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  int64_t length() const {
    return dim_ == 0 ? 0 : static_cast<int64_t>(values_.size()) / dim_;
  }
  double at(int64_t t, int k) const { return values_[t * dim_ + k]; }
  std::span<const double> row(int64_t t) const {
    return std::span<const double>(values_).subspan(t * dim_, dim_);
  }
  std::span<const double> values() const { return values_; }

  // Appends one timestamp; fails on wrong width or non-finite entries.
  absl::Status Append(std::span<const double> row);

  // Multiplies dimension k by `factor` at every timestamp.
  void ScaleDimension(int k, double factor);

 private:
  int dim_ = 0;
  std::vector<double> values_;
};

}  // namespace dpcrowd

#endif  // DPCROWD_CORE_MODEL_H_
