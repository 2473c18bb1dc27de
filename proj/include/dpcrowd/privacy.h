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

// Laplace perturbation and privacy-budget accounting.
//
// Two ledger modes are supported. A user-level ledger bounds the total spend
// over a finite stream. A w-event ledger bounds the spend inside every
// sliding window of w consecutive timestamps. Both are kept per dimension and
// reject (fail closed) any charge that would break their bound.

#ifndef DPCROWD_PRIVACY_H_
#define DPCROWD_PRIVACY_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpcrowd/random.h"

namespace dpcrowd {

// Inverse CDF of the zero-mean Laplace distribution with scale b, evaluated
// at u in (0, 1).
double LaplaceInverseCdf(double u, double scale);

// One draw from Laplace(0, scale) using a single uniform.
absl::StatusOr<double> LaplaceSample(double scale, Rng& rng);

// z = x + Laplace(sensitivity / epsilon).
absl::StatusOr<double> PerturbCount(double x, double sensitivity,
                                    double epsilon, Rng& rng);

// Laplace mechanism for a counting query whose sensitivity is c (the number
// of servers a single user may register with).
class LaplaceMechanism {
 public:
  static absl::StatusOr<LaplaceMechanism> Create(double sensitivity);

  double sensitivity() const { return sensitivity_; }
  // Noise scale b = sensitivity / epsilon.
  absl::StatusOr<double> Scale(double epsilon) const;
  // Noise variance 2 b^2.
  absl::StatusOr<double> NoiseVariance(double epsilon) const;
  absl::StatusOr<double> Perturb(double x, double epsilon, Rng& rng) const;

 private:
  explicit LaplaceMechanism(double sensitivity) : sensitivity_(sensitivity) {}
  double sensitivity_;
};

// Draws Laplace noise of the given scale. Lets tests pin the noise.
using NoiseSource = std::function<double(double scale)>;
NoiseSource LaplaceNoise(Rng& rng);

enum class LedgerMode { kUserLevel, kWEvent };

struct BudgetCharge {
  int64_t t;
  double epsilon;
};

class PrivacyLedger {
 public:
  static absl::StatusOr<PrivacyLedger> UserLevel(double total, int dims);
  static absl::StatusOr<PrivacyLedger> WEvent(double total, int window,
                                              int dims);

  LedgerMode mode() const { return mode_; }
  double total() const { return total_; }
  // Window length; 0 for user-level ledgers.
  int window() const { return window_; }
  int dims() const { return static_cast<int>(charges_.size()); }

  // Records a spend of `epsilon` on `dim` at timestamp `t`. Timestamps must
  // be non-decreasing per dimension. A charge that would push any window
  // (or the stream total) over budget is rejected with ResourceExhausted and
  // leaves the ledger unchanged.
  absl::Status Charge(int dim, int64_t t, double epsilon);
  bool CanCharge(int dim, int64_t t, double epsilon) const;

  // Spend inside [t - w + 1, t] for w-event ledgers; all spend up to t for
  // user-level ledgers.
  double WindowSpend(int dim, int64_t t) const;
  // Spend inside [t - w + 1, t - 1], i.e. what is already committed in the
  // window that a charge at t would complete.
  double SpendBefore(int dim, int64_t t) const;
  double TotalSpend(int dim) const;

  std::span<const BudgetCharge> charges(int dim) const { return charges_[dim]; }

 private:
  PrivacyLedger(LedgerMode mode, double total, int window, int dims)
      : mode_(mode), total_(total), window_(window), charges_(dims) {}

  // Sum of charges on `dim` with first <= t <= last.
  double SumRange(int dim, int64_t first, int64_t last) const;

  LedgerMode mode_;
  double total_;
  int window_;
  std::vector<std::vector<BudgetCharge>> charges_;
};

// Uniform split of `total` across `samples` sampling timestamps. The result
// is rounded down when needed so that `samples` charges never exceed
// `total`.
double AllocateUniform(double total, int64_t samples);

struct AllocationConfig {
  double mu = 0.5;
  double p_max = 0.6;
  // Absolute cap on a single allocation.
  double eps_max = 0.5;
};

// Portion-of-remaining allocation for w-event ledgers:
//   remaining = total - spend in [t-w+1, t-1]
//   p = min(mu ln(I + 1), p_max),  eps = min(p remaining, eps_max).
// Returns 0 when nothing remains. The returned value is always accepted by
// `ledger.Charge(dim, t, ...)`.
double AllocateAdaptive(const PrivacyLedger& ledger, int dim, int64_t t,
                        int64_t interval, const AllocationConfig& config);

struct GroupPartition;
class RawAggregate;

// Defined in grouping.cc.
absl::StatusOr<std::vector<std::optional<double>>> PerturbGroups(
    const GroupPartition& partition, RawAggregate&& raw,
    std::span<const double> budgets, double sensitivity, PrivacyLedger& ledger,
    int64_t t, const NoiseSource& noise);

// Unperturbed per-server aggregate, one value per dimension. Move-only. The
// values can only leave through a perturbation routine (or the explicit
// non-private release), after which the aggregate is empty.
class RawAggregate {
 public:
  explicit RawAggregate(std::vector<double> values)
      : values_(std::move(values)) {}
  RawAggregate(RawAggregate&&) = default;
  RawAggregate& operator=(RawAggregate&&) = default;
  RawAggregate(const RawAggregate&) = delete;
  RawAggregate& operator=(const RawAggregate&) = delete;

  int dim() const { return static_cast<int>(values_.size()); }

 private:
  friend absl::StatusOr<std::vector<std::optional<double>>> PerturbGroups(
      const GroupPartition&, RawAggregate&&, std::span<const double>, double,
      PrivacyLedger&, int64_t, const NoiseSource&);
  friend std::vector<double> ReleaseWithoutPrivacy(RawAggregate&& raw);

  std::vector<double> values_;
};

// Non-private pipeline only: hands back the raw values.
std::vector<double> ReleaseWithoutPrivacy(RawAggregate&& raw);

}  // namespace dpcrowd

#endif  // DPCROWD_PRIVACY_H_
