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

#include "dpcrowd/privacy.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"

namespace dpcrowd {
namespace {

// Exact running sum of doubles as a list of non-overlapping partials
// (Shewchuk). Budget decisions are made on the exact value so that
// equal-split allocations never trip the bound through rounding.
class ExactSum {
 public:
  void Add(double x) {
    size_t i = 0;
    for (double y : partials_) {
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials_[i++] = lo;
      x = hi;
    }
    partials_.resize(i);
    partials_.push_back(x);
  }

  // Sign of the exact sum: the largest partial dominates the rest.
  int Sign() const {
    for (auto it = partials_.rbegin(); it != partials_.rend(); ++it) {
      if (*it > 0) return 1;
      if (*it < 0) return -1;
    }
    return 0;
  }

  double Value() const {
    double s = 0.0;
    for (double p : partials_) s += p;
    return s;
  }

 private:
  std::vector<double> partials_;
};

}  // namespace

double LaplaceInverseCdf(double u, double scale) {
  if (u <= 0.5) return scale * std::log(2.0 * u);
  return -scale * std::log(2.0 * (1.0 - u));
}

absl::StatusOr<double> LaplaceSample(double scale, Rng& rng) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Laplace scale must be positive and finite, got ", scale));
  }
  return LaplaceInverseCdf(rng.Uniform(), scale);
}

absl::StatusOr<double> PerturbCount(double x, double sensitivity,
                                    double epsilon, Rng& rng) {
  auto mech = LaplaceMechanism::Create(sensitivity);
  if (!mech.ok()) return mech.status();
  return mech->Perturb(x, epsilon, rng);
}

absl::StatusOr<LaplaceMechanism> LaplaceMechanism::Create(double sensitivity) {
  if (!(sensitivity > 0.0) || !std::isfinite(sensitivity)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sensitivity must be positive, got ", sensitivity));
  }
  return LaplaceMechanism(sensitivity);
}

absl::StatusOr<double> LaplaceMechanism::Scale(double epsilon) const {
  if (!(epsilon > 0.0)) {
    return absl::FailedPreconditionError(
        absl::StrCat("privacy budget must be positive, got ", epsilon));
  }
  return sensitivity_ / epsilon;
}

absl::StatusOr<double> LaplaceMechanism::NoiseVariance(double epsilon) const {
  auto b = Scale(epsilon);
  if (!b.ok()) return b.status();
  return 2.0 * *b * *b;
}

absl::StatusOr<double> LaplaceMechanism::Perturb(double x, double epsilon,
                                                 Rng& rng) const {
  auto b = Scale(epsilon);
  if (!b.ok()) return b.status();
  auto noise = LaplaceSample(*b, rng);
  if (!noise.ok()) return noise.status();
  return x + *noise;
}

NoiseSource LaplaceNoise(Rng& rng) {
  return [&rng](double scale) { return LaplaceInverseCdf(rng.Uniform(), scale); };
}

absl::StatusOr<PrivacyLedger> PrivacyLedger::UserLevel(double total, int dims) {
  if (!(total > 0.0) || !std::isfinite(total)) {
    return absl::InvalidArgumentError("total privacy budget must be positive");
  }
  if (dims < 1) return absl::InvalidArgumentError("ledger needs dims >= 1");
  return PrivacyLedger(LedgerMode::kUserLevel, total, 0, dims);
}

absl::StatusOr<PrivacyLedger> PrivacyLedger::WEvent(double total, int window,
                                                    int dims) {
  if (!(total > 0.0) || !std::isfinite(total)) {
    return absl::InvalidArgumentError("total privacy budget must be positive");
  }
  if (window < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("w-event window must be >= 1, got ", window));
  }
  if (dims < 1) return absl::InvalidArgumentError("ledger needs dims >= 1");
  return PrivacyLedger(LedgerMode::kWEvent, total, window, dims);
}

double PrivacyLedger::SumRange(int dim, int64_t first,
                                    int64_t last) const {
  ExactSum sum;
  const auto& list = charges_[dim];
  for (auto it = list.rbegin(); it != list.rend() && it->t >= first; ++it) {
    if (it->t <= last) sum.Add(it->epsilon);
  }
  return sum.Value();
}

bool PrivacyLedger::CanCharge(int dim, int64_t t, double epsilon) const {
  if (dim < 0 || dim >= dims() || !(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    return false;
  }
  const auto& list = charges_[dim];
  if (!list.empty() && t < list.back().t) return false;
  // Every earlier charge is at or before t, so the window ending at t is the
  // fullest window that contains t.
  const int64_t first = mode_ == LedgerMode::kWEvent ? t - window_ + 1
                                                      : INT64_MIN;
  ExactSum sum;
  for (auto it = list.rbegin(); it != list.rend() && it->t >= first; ++it) {
    sum.Add(it->epsilon);
  }
  sum.Add(epsilon);
  sum.Add(-total_);
  return sum.Sign() <= 0;
}

absl::Status PrivacyLedger::Charge(int dim, int64_t t, double epsilon) {
  if (dim < 0 || dim >= dims()) {
    return absl::InvalidArgumentError(absl::StrCat("no ledger dimension ", dim));
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("charge must be finite and non-negative, got ", epsilon));
  }
  auto& list = charges_[dim];
  if (!list.empty() && t < list.back().t) {
    return absl::FailedPreconditionError(
        absl::StrCat("charge at t=", t, " precedes last charge at t=",
                     list.back().t));
  }
  if (!CanCharge(dim, t, epsilon)) {
    if (mode_ == LedgerMode::kWEvent) {
      return absl::ResourceExhaustedError(absl::StrCat(
          "budget violation on dim ", dim, ": window [", t - window_ + 1, ", ",
          t, "] would spend ", WindowSpend(dim, t) + epsilon, " > ", total_));
    }
    return absl::ResourceExhaustedError(
        absl::StrCat("budget violation on dim ", dim, ": stream [1, ", t,
                     "] would spend ", TotalSpend(dim) + epsilon, " > ",
                     total_));
  }
  list.push_back({t, epsilon});
  return absl::OkStatus();
}

double PrivacyLedger::WindowSpend(int dim, int64_t t) const {
  if (mode_ == LedgerMode::kUserLevel) {
    return SumRange(dim, INT64_MIN, t);
  }
  return SumRange(dim, t - window_ + 1, t);
}

double PrivacyLedger::SpendBefore(int dim, int64_t t) const {
  if (mode_ == LedgerMode::kUserLevel) {
    return SumRange(dim, INT64_MIN, t - 1);
  }
  return SumRange(dim, t - window_ + 1, t - 1);
}

double PrivacyLedger::TotalSpend(int dim) const {
  return SumRange(dim, INT64_MIN, INT64_MAX);
}

double AllocateUniform(double total, int64_t samples) {
  const double n = static_cast<double>(samples);
  double share = total / n;
  // fma gives the sign of share * n - total exactly.
  while (share > 0.0 && std::fma(share, n, -total) > 0.0) {
    share = std::nextafter(share, 0.0);
  }
  return share;
}

double AllocateAdaptive(const PrivacyLedger& ledger, int dim, int64_t t,
                        int64_t interval, const AllocationConfig& config) {
  const double remaining = ledger.total() - ledger.SpendBefore(dim, t);
  if (!(remaining > 0.0)) return 0.0;
  const double portion =
      std::min(config.mu * std::log(static_cast<double>(interval) + 1.0),
               config.p_max);
  double eps = std::min(portion * remaining, config.eps_max);
  if (!(eps > 0.0)) return 0.0;
  // The remaining budget above is rounded; step down until the exact check
  // agrees.
  for (int i = 0; i < 64 && !ledger.CanCharge(dim, t, eps); ++i) {
    eps = std::nextafter(eps, 0.0);
  }
  return ledger.CanCharge(dim, t, eps) ? eps : 0.0;
}

std::vector<double> ReleaseWithoutPrivacy(RawAggregate&& raw) {
  std::vector<double> out = std::move(raw.values_);
  raw.values_.clear();
  return out;
}

}  // namespace dpcrowd
