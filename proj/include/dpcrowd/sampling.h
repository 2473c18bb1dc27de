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

// Fixed-rate and PID-driven adaptive sampling. A sampling point is a
// timestamp at which a server spends budget, perturbs and broadcasts; every
// other timestamp it stays silent and approximates.

#ifndef DPCROWD_SAMPLING_H_
#define DPCROWD_SAMPLING_H_

#include <cstdint>
#include <deque>
#include <optional>

namespace dpcrowd {

struct PidGains {
  double cp = 0.9;
  double ci = 0.1;
  double cd = 0.0;
  int integral_window = 5;
};

class PidController {
 public:
  explicit PidController(PidGains gains) : gains_(gains) {}

  // Delta = cp E + ci mean(last T_i errors, including E)
  //       + cd (E - E_prev) / max(1, t - t_prev).
  // The derivative term is zero on the first call.
  double Update(double error, int64_t t);

  const PidGains& gains() const { return gains_; }
  size_t history_size() const { return history_.size(); }

 private:
  PidGains gains_;
  std::deque<double> history_;
  std::optional<double> last_error_;
  int64_t last_sample_time_ = 0;
};

// |posterior - prior| / max(|posterior|, delta).
double FeedbackError(double prior, double posterior, double delta);

// max(1, I + round(theta (1 - (Delta / xi)^2))).
int64_t NextInterval(int64_t interval, double delta, double theta, double xi);

// max(1, I + round(theta (1 - Delta * remaining_budget))).
int64_t NextIntervalPlus(int64_t interval, double delta,
                         double remaining_budget, double theta);

enum class SamplingMode { kFixed, kAdaptive };

class SamplingSchedule {
 public:
  // `max_samples` caps the number of sampling points (finite-stream mode);
  // std::nullopt means no cap.
  SamplingSchedule(SamplingMode mode, int64_t interval,
                   std::optional<int64_t> max_samples);

  // True iff t is the next scheduled point and the cap is not exhausted.
  // The first scheduled point is t = 1.
  bool IsSamplingPoint(int64_t t) const;

  // Books a sample at t and schedules the next point at t + interval().
  void RecordSample(int64_t t);
  // Retries at t + 1 after a scheduled point that could not be used.
  void Postpone(int64_t t) { next_sample_t_ = t + 1; }
  // Replaces the interval; the next point becomes `from + interval`.
  void SetInterval(int64_t interval, int64_t from);
  // Starts over as if at t = `t` were the first timestamp.
  void Restart(int64_t t);

  SamplingMode mode() const { return mode_; }
  int64_t interval() const { return interval_; }
  int64_t next_sample_t() const { return next_sample_t_; }
  int64_t samples_used() const { return samples_used_; }
  std::optional<int64_t> max_samples() const { return max_samples_; }

 private:
  SamplingMode mode_;
  int64_t initial_interval_;
  int64_t interval_;
  int64_t next_sample_t_ = 1;
  int64_t samples_used_ = 0;
  std::optional<int64_t> max_samples_;
};

}  // namespace dpcrowd

#endif  // DPCROWD_SAMPLING_H_
