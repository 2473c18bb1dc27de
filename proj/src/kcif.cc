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

#include "dpcrowd/kcif.h"

#include <algorithm>
#include <bit>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace dpcrowd {
namespace {

// (sum_j |A_kj| sqrt(M_j))^2 + Q_kk. Bounds the prior error variance for any
// correlation between the per-dimension posterior errors, and equals
// A^2 M + Q when A is diagonal.
std::vector<double> PropagateVariance(const ProcessModel& model,
                                      std::span<const double> posterior_var) {
  const int d = model.dim();
  std::vector<double> out(d);
  for (int k = 0; k < d; ++k) {
    double s = 0.0;
    int nonzero = 0;
    int last = 0;
    for (int j = 0; j < d; ++j) {
      const double a = model.transition(k, j);
      if (a != 0.0) {
        s += std::fabs(a) * std::sqrt(posterior_var[j]);
        ++nonzero;
        last = j;
      }
    }
    if (nonzero == 1) {
      // Skip the square root so the scalar recursion stays exact.
      const double a = model.transition(k, last);
      out[k] = a * a * posterior_var[last] + model.noise_variance(k);
    } else {
      out[k] = s * s + model.noise_variance(k);
    }
  }
  return out;
}

void PutU64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint64_t GetU64(std::span<const uint8_t> in, size_t pos) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(in[pos + i]) << (8 * i);
  return v;
}

}  // namespace

double EffectiveVariance(double h, std::optional<double> epsilon,
                         double sensitivity, double q_kk, double alpha) {
  double perturbation = 0.0;
  if (epsilon.has_value()) {
    const double b = sensitivity / *epsilon;
    perturbation = 2.0 * b * b;
  }
  return EffectiveVarianceFromNoise(h, perturbation, q_kk, alpha);
}

double EffectiveVarianceFromNoise(double h, double perturbation_variance,
                                  double q_kk, double alpha) {
  const double r = alpha * (perturbation_variance + h * h * q_kk);
  return std::max(r, kMinEffectiveVariance);
}

KcifState KcifState::Empty(int dim) {
  KcifState s;
  s.prior.assign(dim, 0.0);
  s.posterior.assign(dim, 0.0);
  s.prior_var.assign(dim, 1.0);
  s.posterior_var.assign(dim, 1.0);
  return s;
}

KcifState InitialState(const ProcessModel& model, int64_t t, double h,
                       std::span<const std::optional<double>> z,
                       std::span<const double> rhat) {
  const int d = model.dim();
  KcifState s = KcifState::Empty(d);
  s.t = t;
  s.initialized = true;
  for (int k = 0; k < d; ++k) {
    const double q = model.noise_variance(k);
    double m0;
    if (h > 0.0 && z[k].has_value()) {
      s.prior[k] = *z[k] / h;
      m0 = h * h / rhat[k];
    } else {
      s.prior[k] = 0.0;
      m0 = q > 0.0 ? 1e6 * q : 1e6;
    }
    s.posterior_var[k] = m0;
    s.posterior[k] = s.prior[k];
  }
  s.prior_var = PropagateVariance(model, s.posterior_var);
  return s;
}

KcifState Predict(const KcifState& state, const ProcessModel& model) {
  KcifState next = state;
  next.t = state.t + 1;
  next.prior = model.Apply(state.posterior);
  next.prior_var = PropagateVariance(model, state.posterior_var);
  return next;
}

absl::StatusOr<NeighborMessage> BuildMessage(
    int sender, const KcifState& state, double h,
    std::span<const std::optional<double>> z, std::span<const double> rhat) {
  const int d = state.dim();
  if (static_cast<int>(z.size()) != d || static_cast<int>(rhat.size()) != d) {
    return absl::InvalidArgumentError("message inputs do not match filter dimension");
  }
  NeighborMessage msg;
  msg.sender = sender;
  msg.t = state.t;
  msg.prior = state.prior;
  msg.u.assign(d, 0.0);
  msg.U.assign(d, 0.0);
  for (int k = 0; k < d; ++k) {
    if (!z[k].has_value()) continue;
    if (!(rhat[k] > 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("effective variance must be positive, got ", rhat[k]));
    }
    msg.u[k] = h * *z[k] / rhat[k];
    msg.U[k] = h * h / rhat[k];
  }
  return msg;
}

absl::StatusOr<Fusion> Fuse(const NeighborMessage& own,
                            std::span<const NeighborMessage* const> inbox) {
  Fusion f{own.u, own.U};
  std::vector<int> seen{own.sender};
  for (const NeighborMessage* msg : inbox) {
    if (std::find(seen.begin(), seen.end(), msg->sender) != seen.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate message from server ", msg->sender));
    }
    seen.push_back(msg->sender);
    if (msg->u.size() != f.y.size() || msg->U.size() != f.Y.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("message from server ", msg->sender,
                       " has the wrong dimension"));
    }
    for (size_t k = 0; k < f.y.size(); ++k) {
      f.y[k] += msg->u[k];
      f.Y[k] += msg->U[k];
    }
  }
  return f;
}

KcifState Update(const KcifState& state, const Fusion& fusion,
                 std::span<const std::span<const double>> neighbor_priors,
                 double beta) {
  KcifState next = state;
  for (int k = 0; k < state.dim(); ++k) {
    const double p = state.prior_var[k];
    const double xbar = state.prior[k];
    const double Y = fusion.Y[k];
    const double m = Y == 0.0 ? p : 1.0 / (1.0 / p + Y);
    const double gain = beta * p / (std::fabs(p) + 1.0);
    double disagreement = 0.0;
    for (std::span<const double> other : neighbor_priors) {
      disagreement += other[k] - xbar;
    }
    next.posterior_var[k] = m;
    next.posterior[k] =
        xbar + m * (fusion.y[k] - Y * xbar) + gain * disagreement;
  }
  return next;
}

std::vector<uint8_t> SerializeMessage(const NeighborMessage& msg) {
  std::vector<uint8_t> out;
  out.reserve(MessageBytes(static_cast<int>(msg.prior.size())));
  const auto sender = static_cast<uint32_t>(msg.sender);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(sender >> (8 * i)));
  PutU64(out, static_cast<uint64_t>(msg.t));
  for (size_t k = 0; k < msg.prior.size(); ++k) {
    PutU64(out, std::bit_cast<uint64_t>(msg.prior[k]));
    PutU64(out, std::bit_cast<uint64_t>(msg.u[k]));
    PutU64(out, std::bit_cast<uint64_t>(msg.U[k]));
  }
  return out;
}

absl::StatusOr<NeighborMessage> DeserializeMessage(std::span<const uint8_t> bytes) {
  if (bytes.size() < 12 || (bytes.size() - 12) % 24 != 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed message of ", bytes.size(), " bytes"));
  }
  NeighborMessage msg;
  uint32_t sender = 0;
  for (int i = 0; i < 4; ++i) sender |= static_cast<uint32_t>(bytes[i]) << (8 * i);
  msg.sender = static_cast<int>(sender);
  msg.t = static_cast<int64_t>(GetU64(bytes, 4));
  const size_t d = (bytes.size() - 12) / 24;
  for (size_t k = 0; k < d; ++k) {
    const size_t pos = 12 + 24 * k;
    msg.prior.push_back(std::bit_cast<double>(GetU64(bytes, pos)));
    msg.u.push_back(std::bit_cast<double>(GetU64(bytes, pos + 8)));
    msg.U.push_back(std::bit_cast<double>(GetU64(bytes, pos + 16)));
  }
  return msg;
}

}  // namespace dpcrowd
