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

#include "dpcrowd/sampling.h"

#include <algorithm>
#include <cmath>

namespace dpcrowd {
namespace {

// Interval plus a rounded step, floored at 1. Huge negative steps (a
// blown-up error signal) saturate instead of overflowing.
int64_t ApplyStep(int64_t interval, double step) {
  const double next = static_cast<double>(interval) + std::clamp(step, -1e15, 1e15);
  return next >= 1.0 ? static_cast<int64_t>(next) : 1;
}

}  // namespace

double PidController::Update(double error, int64_t t) {
  history_.push_back(error);
  while (static_cast<int>(history_.size()) > gains_.integral_window) {
    history_.pop_front();
  }
  double mean = 0.0;
  for (double e : history_) mean += e;
  mean /= static_cast<double>(history_.size());

  double derivative = 0.0;
  if (last_error_.has_value()) {
    const double gap = static_cast<double>(std::max<int64_t>(1, t - last_sample_time_));
    derivative = (error - *last_error_) / gap;
  }
  last_error_ = error;
  last_sample_time_ = t;
  return gains_.cp * error + gains_.ci * mean + gains_.cd * derivative;
}

double FeedbackError(double prior, double posterior, double delta) {
  return std::fabs(posterior - prior) / std::max(std::fabs(posterior), delta);
}

int64_t NextInterval(int64_t interval, double delta, double theta, double xi) {
  const double ratio = delta / xi;
  return ApplyStep(interval, std::round(theta * (1.0 - ratio * ratio)));
}

int64_t NextIntervalPlus(int64_t interval, double delta,
                         double remaining_budget, double theta) {
  return ApplyStep(interval,
                   std::round(theta * (1.0 - delta * remaining_budget)));
}

SamplingSchedule::SamplingSchedule(SamplingMode mode, int64_t interval,
                                   std::optional<int64_t> max_samples)
    : mode_(mode),
      initial_interval_(std::max<int64_t>(1, interval)),
      interval_(initial_interval_),
      max_samples_(max_samples) {}

bool SamplingSchedule::IsSamplingPoint(int64_t t) const {
  if (t != next_sample_t_) return false;
  return !max_samples_.has_value() || samples_used_ < *max_samples_;
}

void SamplingSchedule::RecordSample(int64_t t) {
  ++samples_used_;
  next_sample_t_ = t + interval_;
}

void SamplingSchedule::SetInterval(int64_t interval, int64_t from) {
  interval_ = std::max<int64_t>(1, interval);
  next_sample_t_ = from + interval_;
}

void SamplingSchedule::Restart(int64_t t) {
  interval_ = initial_interval_;
  next_sample_t_ = t;
  samples_used_ = 0;
}

}  // namespace dpcrowd
