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

#include "dpcrowd/grouping.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace dpcrowd {
namespace {

std::vector<double> PaddedWindow(std::span<const double> history, int tau) {
  std::vector<double> out;
  if (history.empty() || tau < 1) return out;
  const size_t n = std::min<size_t>(history.size(), tau);
  out.assign(tau - n, history[history.size() - n]);
  out.insert(out.end(), history.end() - n, history.end());
  return out;
}

void Normalize(std::vector<double>& v) {
  if (v.empty()) return;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double min = *lo;
  const double range = *hi - *lo;
  for (double& x : v) x = range > 0.0 ? (x - min) / range : 0.0;
}

}  // namespace

GroupingThresholds DefaultThresholds(double sensitivity, double average_epsilon) {
  GroupingThresholds th;
  th.large = 2.0 * std::sqrt(2.0) * sensitivity / average_epsilon;
  th.similarity = th.large / 2.0;
  th.deviation = 0.5;
  th.history_window = 3;
  return th;
}

double PredictRegion(std::span<const double> history, int tau) {
  const std::vector<double> w = PaddedWindow(history, tau);
  if (w.empty()) return 0.0;
  return std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
}

double TrendDeviation(std::span<const double> a, std::span<const double> b,
                      int tau) {
  std::vector<double> wa = PaddedWindow(a, tau);
  std::vector<double> wb = PaddedWindow(b, tau);
  if (wa.empty() || wb.empty()) return 0.0;
  Normalize(wa);
  Normalize(wb);
  double s = 0.0;
  for (size_t i = 0; i < wa.size(); ++i) s += std::fabs(wa[i] - wb[i]);
  return s / static_cast<double>(wa.size());
}

GroupPartition Singletons(std::span<const int> sampling_set) {
  GroupPartition p;
  std::vector<int> sorted(sampling_set.begin(), sampling_set.end());
  std::sort(sorted.begin(), sorted.end());
  for (int k : sorted) p.groups.push_back({k});
  return p;
}

GroupPartition GroupRegions(std::span<const int> sampling_set,
                            std::span<const double> predictions,
                            std::span<const std::vector<double>> histories,
                            const GroupingThresholds& thresholds) {
  GroupPartition p;
  std::vector<int> small;
  for (int k : sampling_set) {
    if (predictions[k] >= thresholds.large || histories[k].empty()) {
      p.groups.push_back({k});
    } else {
      small.push_back(k);
    }
  }
  std::sort(small.begin(), small.end(), [&](int a, int b) {
    if (predictions[a] != predictions[b]) return predictions[a] < predictions[b];
    return a < b;
  });
  std::vector<bool> taken(small.size(), false);
  for (size_t s = 0; s < small.size(); ++s) {
    if (taken[s]) continue;
    const int seed = small[s];
    taken[s] = true;
    std::vector<int> group{seed};
    for (size_t j = s + 1; j < small.size(); ++j) {
      if (taken[j]) continue;
      const int other = small[j];
      if (std::fabs(predictions[other] - predictions[seed]) > thresholds.similarity) {
        continue;
      }
      if (TrendDeviation(histories[other], histories[seed],
                         thresholds.history_window) > thresholds.deviation) {
        continue;
      }
      taken[j] = true;
      group.push_back(other);
    }
    std::sort(group.begin(), group.end());
    p.groups.push_back(std::move(group));
  }
  std::sort(p.groups.begin(), p.groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return p;
}

absl::Status ValidatePartition(const GroupPartition& partition,
                               std::span<const int> sampling_set) {
  std::vector<int> members;
  for (const auto& g : partition.groups) {
    if (g.empty()) return absl::InternalError("empty group in partition");
    members.insert(members.end(), g.begin(), g.end());
  }
  std::sort(members.begin(), members.end());
  if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
    return absl::InternalError("groups overlap");
  }
  std::vector<int> expected(sampling_set.begin(), sampling_set.end());
  std::sort(expected.begin(), expected.end());
  if (members != expected) {
    return absl::InternalError("groups do not cover the sampling set");
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<std::optional<double>>> PerturbGroups(
    const GroupPartition& partition, RawAggregate&& raw,
    std::span<const double> budgets, double sensitivity, PrivacyLedger& ledger,
    int64_t t, const NoiseSource& noise) {
  std::vector<double> x = std::move(raw.values_);
  raw.values_.clear();
  const int d = static_cast<int>(x.size());
  if (static_cast<int>(budgets.size()) != d || ledger.dims() != d) {
    return absl::InvalidArgumentError(
        "budgets and ledger must match the aggregate dimension");
  }
  if (!(sensitivity > 0.0)) {
    return absl::InvalidArgumentError("sensitivity must be positive");
  }
  std::vector<int> members;
  for (const auto& g : partition.groups) members.insert(members.end(), g.begin(), g.end());
  if (auto st = ValidatePartition(partition, members); !st.ok()) return st;
  for (int k : members) {
    if (k < 0 || k >= d) {
      return absl::InvalidArgumentError(absl::StrCat("no dimension ", k));
    }
    if (!(budgets[k] > 0.0)) {
      return absl::FailedPreconditionError(absl::StrCat(
          "dimension ", k, " has no positive budget (", budgets[k], ")"));
    }
    if (!ledger.CanCharge(k, t, budgets[k])) {
      return absl::ResourceExhaustedError(absl::StrCat(
          "budget violation on dim ", k, " at t=", t, ": spend ",
          ledger.WindowSpend(k, t), " + ", budgets[k], " exceeds ",
          ledger.total()));
    }
  }

  std::vector<std::optional<double>> z(d);
  for (const auto& g : partition.groups) {
    double sum = 0.0;
    double min_eps = budgets[g.front()];
    for (int k : g) {
      sum += x[k];
      min_eps = std::min(min_eps, budgets[k]);
    }
    const double noisy = sum + noise(sensitivity / min_eps);
    for (int k : g) z[k] = noisy / static_cast<double>(g.size());
  }
  for (int k : members) {
    if (auto st = ledger.Charge(k, t, budgets[k]); !st.ok()) return st;
  }
  return z;
}

}  // namespace dpcrowd
