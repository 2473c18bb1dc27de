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
#include <numeric>
#include <vector>

#include "dpcrowd/random.h"
#include "gtest/gtest.h"

namespace dpcrowd {
namespace {

TEST(ComputeAreTest, PerfectEstimatesGiveZero) {
  const std::vector<double> truth = {10, 20, 30};
  std::vector<double> est;
  for (int i = 0; i < 4; ++i) est.insert(est.end(), truth.begin(), truth.end());
  EXPECT_EQ(ComputeAre(est, truth, {4, 3, 1}).value(), 0.0);
}

TEST(ComputeAreTest, Examples) {
  const std::vector<double> eight = {8.0}, ten = {10.0};
  EXPECT_DOUBLE_EQ(ComputeAre(eight, ten, {1, 1, 1}).value(), 0.2);
  const std::vector<double> half = {0.5}, zero = {0.0};
  EXPECT_DOUBLE_EQ(ComputeAre(half, zero, {1, 1, 1}).value(), 0.5);
}

TEST(ComputeAreTest, ShapeMismatchIsError) {
  const std::vector<double> est(6, 0.0), truth(3, 1.0);
  EXPECT_FALSE(ComputeAre(est, truth, {2, 2, 1}).ok());
  EXPECT_FALSE(ComputeAre(est, truth, {3, 2, 1}).ok());
  EXPECT_FALSE(ComputeAre(est, truth, {0, 3, 1}).ok());
}

TEST(ComputeAceTest, Examples) {
  const std::vector<double> same = {3, 3, 3};
  EXPECT_EQ(ComputeAce(same, {3, 1, 1}).value(), 0.0);
  const std::vector<double> pair = {4, 6};
  EXPECT_DOUBLE_EQ(ComputeAce(pair, {2, 1, 1}).value(), 1.0);
  const std::vector<double> single = {1, 5, 9};
  EXPECT_EQ(ComputeAce(single, {1, 3, 1}).value(), 0.0);
}

TEST(ComputeAceTest, IdenticalAwkwardValuesGiveExactZero) {
  const std::vector<double> est(7, 0.1 + 0.2);
  EXPECT_EQ(ComputeAce(est, {7, 1, 1}).value(), 0.0);
}

// Direct evaluation of the averaged absolute errors.
double BruteAre(const std::vector<double>& est, const std::vector<double>& truth,
                int m, int T, int d) {
  double s = 0.0;
  for (int i = 0; i < m; ++i)
    for (int t = 0; t < T; ++t)
      for (int k = 0; k < d; ++k) {
        const double r = truth[t * d + k];
        s += std::fabs(est[(i * T + t) * d + k] - r) / std::max(r, 1.0);
      }
  return s / (static_cast<double>(m) * T * d);
}

double BruteAce(const std::vector<double>& est, int m, int T, int d) {
  double s = 0.0;
  for (int t = 0; t < T; ++t)
    for (int k = 0; k < d; ++k) {
      double mean = 0.0;
      for (int i = 0; i < m; ++i) mean += est[(i * T + t) * d + k];
      mean /= m;
      for (int i = 0; i < m; ++i) s += std::fabs(est[(i * T + t) * d + k] - mean);
    }
  return s / (static_cast<double>(m) * T * d);
}

TEST(MetricsPropertyTest, MatchBruteForceAndIgnoreServerOrder) {
  Rng rng(50);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + static_cast<int>(rng.UniformInt(6));
    const int T = 1 + static_cast<int>(rng.UniformInt(20));
    const int d = 1 + static_cast<int>(rng.UniformInt(4));
    std::vector<double> truth(T * d), est(m * T * d);
    for (double& v : truth) v = rng.Uniform(0.0, 50.0);
    for (double& v : est) v = rng.Uniform(-10.0, 60.0);
    const EstimateShape shape{m, T, d};
    const double are = ComputeAre(est, truth, shape).value();
    const double ace = ComputeAce(est, shape).value();
    EXPECT_NEAR(are, BruteAre(est, truth, m, T, d), 1e-12);
    EXPECT_NEAR(ace, BruteAce(est, m, T, d), 1e-9);
    EXPECT_GE(are, 0.0);
    EXPECT_GE(ace, 0.0);

    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::reverse(order.begin(), order.end());
    std::vector<double> permuted;
    for (int i : order) {
      permuted.insert(permuted.end(), est.begin() + i * T * d,
                      est.begin() + (i + 1) * T * d);
    }
    EXPECT_NEAR(ComputeAre(permuted, truth, shape).value(), are, 1e-12);
    EXPECT_NEAR(ComputeAce(permuted, shape).value(), ace, 1e-9);
  }
}

TEST(TraceTest, LengthIsT) {
  const std::vector<double> est(2 * 5 * 3, 1.0), truth(5 * 3, 2.0);
  EXPECT_EQ(RelativeErrorTrace(est, truth, {2, 5, 3}).value().size(), 5u);
  EXPECT_EQ(ConsensusErrorTrace(est, {2, 5, 3}).value().size(), 5u);
}

TEST(AverageTest, MeansFieldsAndTraces) {
  MetricsReport a, b;
  a.are = 1.0;
  b.are = 3.0;
  a.packets = 10;
  b.packets = 20;
  a.relative_error_trace = {1, 2};
  b.relative_error_trace = {3, 4};
  const std::vector<MetricsReport> runs = {a, b};
  const MetricsReport avg = Average(runs).value();
  EXPECT_EQ(avg.are, 2.0);
  EXPECT_EQ(avg.packets, 15.0);
  EXPECT_EQ(avg.runs, 2);
  EXPECT_EQ(avg.relative_error_trace, (std::vector<double>{2, 3}));
  EXPECT_FALSE(Average({}).ok());
  b.relative_error_trace = {1};
  const std::vector<MetricsReport> ragged = {a, b};
  EXPECT_FALSE(Average(ragged).ok());
}

}  // namespace
}  // namespace dpcrowd
