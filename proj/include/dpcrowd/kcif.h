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

// Kalman-consensus information filter.
//
// Because Q is diagonal and the observation coefficient is a scalar per
// server, a d-dimensional filter splits into d scalar filters that share H.
// The only cross-dimension coupling is through A in the prior mean.

#ifndef DPCROWD_KCIF_H_
#define DPCROWD_KCIF_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpcrowd/core_model.h"

namespace dpcrowd {

inline constexpr double kMinEffectiveVariance = 1e-12;

struct KcifParams {
  // Proportionality coefficient on the effective measurement variance.
  double alpha = 1.0;
  // Consensus step constant.
  double beta = 0.02;
};

// R = alpha (2 (sensitivity / epsilon)^2 + H^2 Q_kk). Pass std::nullopt for
// `epsilon` on the non-private path, which drops the perturbation term.
// The result is floored at kMinEffectiveVariance.
double EffectiveVariance(double h, std::optional<double> epsilon,
                         double sensitivity, double q_kk, double alpha);

// Same, with the perturbation-noise variance given directly.
double EffectiveVarianceFromNoise(double h, double perturbation_variance,
                                  double q_kk, double alpha);

struct KcifState {
  int64_t t = 0;
  bool initialized = false;
  std::vector<double> prior;          // x-bar
  std::vector<double> posterior;      // x-hat
  std::vector<double> prior_var;      // P
  std::vector<double> posterior_var;  // M

  static KcifState Empty(int dim);
  int dim() const { return static_cast<int>(prior.size()); }
};

// Seeds the filter from its first sanitized measurement. Per dimension the
// prior is z / H and the initial posterior variance is H^2 / R; the prior
// variance then follows from the covariance prediction. An empty server
// (H = 0) or a missing measurement falls back to a zero prior with
// variance 1e6 Q (1e6 when Q = 0).
KcifState InitialState(const ProcessModel& model, int64_t t, double h,
                       std::span<const std::optional<double>> z,
                       std::span<const double> rhat);

// x-bar <- A x-hat. P_k <- (sum_j |A_kj| sqrt(M_j))^2 + Q_kk, which is
// A^2 M + Q for a scalar or diagonal model.
KcifState Predict(const KcifState& state, const ProcessModel& model);

struct NeighborMessage {
  int sender = 0;
  int64_t t = 0;
  std::vector<double> prior;
  std::vector<double> u;  // weighted measurement H z / R
  std::vector<double> U;  // information weight H^2 / R
};

// Builds the one-hop message. Dimensions without a fresh measurement carry
// u = U = 0 (the prior is still shared).
absl::StatusOr<NeighborMessage> BuildMessage(
    int sender, const KcifState& state, double h,
    std::span<const std::optional<double>> z, std::span<const double> rhat);

struct Fusion {
  std::vector<double> y;
  std::vector<double> Y;
};

// Sums u and U over the server's own message and its inbox. Duplicate
// senders are a protocol error.
absl::StatusOr<Fusion> Fuse(const NeighborMessage& own,
                            std::span<const NeighborMessage* const> inbox);

// Posterior update:
//   M = 1 / (1/P + Y),  C = beta P / (|P| + 1),
//   x-hat = x-bar + M (y - Y x-bar) + C sum_j (x-bar_j - x-bar).
// Y = 0 leaves M = P exactly.
KcifState Update(const KcifState& state, const Fusion& fusion,
                 std::span<const std::span<const double>> neighbor_priors,
                 double beta);

// Canonical little-endian wire form: uint32 sender, int64 t, then one
// (prior, u, U) triple of float64 per dimension.
std::vector<uint8_t> SerializeMessage(const NeighborMessage& msg);
absl::StatusOr<NeighborMessage> DeserializeMessage(std::span<const uint8_t> bytes);
inline int64_t MessageBytes(int dim) { return 12 + 24 * static_cast<int64_t>(dim); }

}  // namespace dpcrowd

#endif  // DPCROWD_KCIF_H_
