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

#include "dpcrowd/core_model.h"

#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"

namespace dpcrowd {

absl::StatusOr<ProcessModel> ProcessModel::Create(
    std::vector<double> transition, std::vector<double> noise_variance) {
  const size_t dim = noise_variance.size();
  if (dim == 0) {
    return absl::InvalidArgumentError("process model needs at least one dimension");
  }
  if (transition.size() != dim * dim) {
    return absl::InvalidArgumentError(
        absl::StrCat("transition matrix has ", transition.size(),
                     " entries, expected ", dim * dim));
  }
  for (double a : transition) {
    if (!std::isfinite(a)) {
      return absl::InvalidArgumentError("transition matrix must be finite");
    }
  }
  for (double q : noise_variance) {
    if (!std::isfinite(q) || q < 0) {
      return absl::InvalidArgumentError(
          "process noise variances must be finite and non-negative");
    }
  }
  return ProcessModel(static_cast<int>(dim), std::move(transition),
                      std::move(noise_variance));
}

ProcessModel ProcessModel::Scalar(double a, double q) {
  return ProcessModel(1, {a}, {q});
}

std::vector<double> ProcessModel::Apply(std::span<const double> r) const {
  std::vector<double> out(dim_, 0.0);
  for (int i = 0; i < dim_; ++i) {
    double acc = 0.0;
    for (int j = 0; j < dim_; ++j) acc += transition(i, j) * r[j];
    out[i] = acc;
  }
  return out;
}

bool ProcessModel::IsDiagonal() const {
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      if (i != j && transition(i, j) != 0.0) return false;
    }
  }
  return true;
}

absl::StatusOr<TrueState> StepProcess(const ProcessModel& model,
                                      const TrueState& state, Rng& rng) {
  if (static_cast<int>(state.r.size()) != model.dim()) {
    return absl::InvalidArgumentError(
        absl::StrCat("state has dimension ", state.r.size(), ", model has ",
                     model.dim()));
  }
  TrueState next{state.t + 1, model.Apply(state.r)};
  for (int k = 0; k < model.dim(); ++k) {
    const double q = model.noise_variance(k);
    // Always draw so the stream position does not depend on Q.
    const double g = rng.Gaussian();
    next.r[k] += std::sqrt(q) * g;
  }
  return next;
}

absl::StatusOr<std::vector<int64_t>> PartitionUsers(int64_t n, int m, Rng& rng) {
  if (n < 1 || m < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("partition needs n >= 1 and m >= 1, got n=", n, " m=", m));
  }
  std::vector<int64_t> sizes(m, 0);
  for (int64_t u = 0; u < n; ++u) {
    ++sizes[rng.UniformInt(static_cast<uint64_t>(m))];
  }
  return sizes;
}

absl::StatusOr<ObservationModel> ObservationModel::FromGroupSizes(
    std::span<const int64_t> group_sizes) {
  ObservationModel obs;
  for (int64_t s : group_sizes) {
    if (s < 0) return absl::InvalidArgumentError("negative group size");
    obs.population += s;
  }
  if (obs.population == 0) {
    return absl::InvalidArgumentError("population is empty");
  }
  obs.coefficients.reserve(group_sizes.size());
  for (int64_t s : group_sizes) {
    obs.coefficients.push_back(static_cast<double>(s) /
                               static_cast<double>(obs.population));
  }
  return obs;
}

absl::StatusOr<std::vector<double>> Observe(double h, std::span<const double> r,
                                            std::span<const double> q_diag,
                                            Rng& rng) {
  if (r.size() != q_diag.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("observation dimension ", r.size(),
                     " does not match noise dimension ", q_diag.size()));
  }
  if (!(h >= 0.0 && h <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("observation coefficient ", h, " outside [0, 1]"));
  }
  std::vector<double> x(r.size());
  for (size_t k = 0; k < r.size(); ++k) {
    const double g = rng.Gaussian();
    x[k] = h * r[k] + h * std::sqrt(q_diag[k]) * g;
  }
  return x;
}

absl::Status StreamPrefix::Append(std::span<const double> row) {
  if (static_cast<int>(row.size()) != dim_) {
    return absl::InvalidArgumentError(
        absl::StrCat("row has ", row.size(), " values, stream has ", dim_));
  }
  for (double v : row) {
    if (!std::isfinite(v)) {
      return absl::InvalidArgumentError("stream values must be finite");
    }
  }
  values_.insert(values_.end(), row.begin(), row.end());
  return absl::OkStatus();
}

void StreamPrefix::ScaleDimension(int k, double factor) {
  for (size_t i = k; i < values_.size(); i += dim_) values_[i] *= factor;
}

}  // namespace dpcrowd
