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

#include "dpcrowd/metrics.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace dpcrowd {
namespace {

size_t Cells(EstimateShape shape) {
  return static_cast<size_t>(shape.servers) * shape.length * shape.dim;
}

absl::Status CheckShape(std::span<const double> estimates, EstimateShape shape) {
  if (shape.servers < 1 || shape.length < 1 || shape.dim < 1) {
    return absl::InvalidArgumentError("metrics need m, T and d >= 1");
  }
  if (estimates.size() != Cells(shape)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "estimates hold ", estimates.size(), " values, expected ", Cells(shape)));
  }
  return absl::OkStatus();
}

double Mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

absl::StatusOr<std::vector<double>> RelativeErrorTrace(
    std::span<const double> estimates, std::span<const double> truth,
    EstimateShape shape, double delta) {
  if (absl::Status s = CheckShape(estimates, shape); !s.ok()) return s;
  const auto [m, T, d] = shape;
  if (truth.size() != static_cast<size_t>(T) * d) {
    return absl::InvalidArgumentError(absl::StrCat(
        "truth holds ", truth.size(), " values, expected ", T * d));
  }
  std::vector<double> trace(T, 0.0);
  for (int64_t t = 0; t < T; ++t) {
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
      for (int k = 0; k < d; ++k) {
        const double r = truth[t * d + k];
        const double x = estimates[(static_cast<size_t>(i) * T + t) * d + k];
        sum += std::fabs(x - r) / std::max(r, delta);
      }
    }
    trace[t] = sum / (static_cast<double>(m) * d);
  }
  return trace;
}

absl::StatusOr<std::vector<double>> ConsensusErrorTrace(
    std::span<const double> estimates, EstimateShape shape) {
  if (absl::Status s = CheckShape(estimates, shape); !s.ok()) return s;
  const auto [m, T, d] = shape;
  auto at = [&](int i, int64_t t, int k) {
    return estimates[(static_cast<size_t>(i) * T + t) * d + k];
  };
  std::vector<double> trace(T, 0.0);
  for (int64_t t = 0; t < T; ++t) {
    double sum = 0.0;
    for (int k = 0; k < d; ++k) {
      // Mean taken relative to server 0 so that identical estimates give a
      // deviation of exactly zero.
      const double x0 = at(0, t, k);
      double shift = 0.0;
      for (int i = 0; i < m; ++i) shift += at(i, t, k) - x0;
      const double mean = x0 + shift / m;
      for (int i = 0; i < m; ++i) sum += std::fabs(at(i, t, k) - mean);
    }
    trace[t] = sum / (static_cast<double>(m) * d);
  }
  return trace;
}

absl::StatusOr<double> ComputeAre(std::span<const double> estimates,
                                  std::span<const double> truth,
                                  EstimateShape shape, double delta) {
  auto trace = RelativeErrorTrace(estimates, truth, shape, delta);
  if (!trace.ok()) return trace.status();
  return Mean(*trace);
}

absl::StatusOr<double> ComputeAce(std::span<const double> estimates,
                                  EstimateShape shape) {
  auto trace = ConsensusErrorTrace(estimates, shape);
  if (!trace.ok()) return trace.status();
  return Mean(*trace);
}

absl::StatusOr<MetricsReport> Summarize(const ExperimentConfig& config,
                                        const RunResult& result) {
  const EstimateShape shape{result.servers(), result.length(), result.dim()};
  auto re = RelativeErrorTrace(result.estimates(), result.truth(), shape);
  if (!re.ok()) return re.status();
  auto ce = ConsensusErrorTrace(result.estimates(), shape);
  if (!ce.ok()) return ce.status();
  MetricsReport r;
  r.algorithm = std::string(AlgorithmName(result.algorithm()));
  r.seed = config.seed;
  r.epsilon = config.epsilon;
  r.w = config.w;
  r.rho = config.net.rho;
  r.m = result.servers();
  r.are = Mean(*re);
  r.ace = Mean(*ce);
  r.packets = static_cast<double>(result.comm().packets);
  r.bytes = static_cast<double>(result.comm().bytes);
  r.max_latency_ms = result.comm().max_latency_ms;
  r.broadcasts = static_cast<double>(result.comm().total_broadcasts());
  r.relative_error_trace = *std::move(re);
  r.consensus_error_trace = *std::move(ce);
  for (const TimestampTrace& tr : result.trace()) {
    r.packets_trace.push_back(static_cast<double>(tr.packets));
  }
  r.config = ConfigEcho(config);
  return r;
}

absl::StatusOr<MetricsReport> Average(std::span<const MetricsReport> runs) {
  if (runs.empty()) return absl::InvalidArgumentError("nothing to average");
  MetricsReport out = runs.front();
  const double n = static_cast<double>(runs.size());
  auto mean_of = [&](auto field) {
    double s = 0.0;
    for (const MetricsReport& r : runs) s += r.*field;
    return s / n;
  };
  out.are = mean_of(&MetricsReport::are);
  out.ace = mean_of(&MetricsReport::ace);
  out.packets = mean_of(&MetricsReport::packets);
  out.bytes = mean_of(&MetricsReport::bytes);
  out.max_latency_ms = mean_of(&MetricsReport::max_latency_ms);
  out.broadcasts = mean_of(&MetricsReport::broadcasts);
  out.runs = static_cast<int64_t>(runs.size());
  auto average_trace = [&](auto field) -> absl::Status {
    std::vector<double>& acc = out.*field;
    for (size_t r = 1; r < runs.size(); ++r) {
      const std::vector<double>& v = runs[r].*field;
      if (v.size() != acc.size()) {
        return absl::InvalidArgumentError("runs have different lengths");
      }
      for (size_t t = 0; t < v.size(); ++t) acc[t] += v[t];
    }
    for (double& x : acc) x /= n;
    return absl::OkStatus();
  };
  for (auto field : {&MetricsReport::relative_error_trace,
                     &MetricsReport::consensus_error_trace,
                     &MetricsReport::packets_trace}) {
    if (absl::Status s = average_trace(field); !s.ok()) return s;
  }
  return out;
}

}  // namespace dpcrowd
