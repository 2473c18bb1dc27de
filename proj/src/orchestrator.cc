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

#include "dpcrowd/orchestrator.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "absl/strings/str_cat.h"
#include "dpcrowd/datasets.h"
#include "dpcrowd/grouping.h"
#include "dpcrowd/kcif.h"
#include "dpcrowd/random.h"
#include "dpcrowd/sampling.h"

namespace dpcrowd {
namespace {

// Estimate payload of one flooded DFAST value: sender, t, one float64 per
// dimension.
int64_t FloodPayloadBytes(int dim) { return 12 + 8 * static_cast<int64_t>(dim); }

struct Server {
  int id = 0;
  KcifState state;
  std::vector<SamplingSchedule> schedules;
  std::vector<PidController> pids;
  // Posteriors published at this server's sampling points, per dimension.
  std::vector<std::vector<double>> published;
  std::vector<double> last_rhat;
  std::vector<double> last_release;
  std::optional<PrivacyLedger> ledger;
  Rng obs_rng{0};
  Rng noise_rng{0};

  // Per-timestamp scratch.
  std::vector<int> sampled;
  std::vector<std::optional<double>> z;
  std::vector<double> rhat;
  NeighborMessage own;
  NeighborMessage outgoing;
  bool broadcast = false;
  std::vector<double> release;
};

class Simulation {
 public:
  Simulation(const ExperimentConfig& config, const Scenario& scenario,
             Algorithm algorithm)
      : config_(config),
        scenario_(scenario),
        algorithm_(algorithm),
        model_(scenario.model),
        m_(config.net.m),
        d_(scenario.model.dim()),
        length_(scenario.truth.length()) {}

  absl::StatusOr<RunResult> Execute();

 private:
  bool one_hop() const {
    return algorithm_ == Algorithm::kNonPrivate ||
           algorithm_ == Algorithm::kDpCrowd ||
           algorithm_ == Algorithm::kDpCrowdPlus ||
           algorithm_ == Algorithm::kDpCrowdW;
  }
  bool windowed() const {
    return algorithm_ == Algorithm::kDpCrowdPlus ||
           algorithm_ == Algorithm::kDpCrowdW;
  }
  bool is_private() const { return algorithm_ != Algorithm::kNonPrivate; }

  absl::Status Setup();
  absl::Status Partition();
  absl::Status PhaseOne(Server& s, int64_t t, std::span<const double> r);
  absl::Status PhaseTwo(Server& s, int64_t t,
                        std::span<const NeighborMessage* const> inbox);

  const ExperimentConfig& config_;
  const Scenario& scenario_;
  const Algorithm algorithm_;
  const ProcessModel& model_;
  const int m_;
  const int d_;
  const int64_t length_;

  std::vector<Server> servers_;
  std::vector<double> h_;
  std::vector<double> observation_q_;
  std::optional<Rng> partition_rng_;
  double share_ = 0.0;
  AllocationConfig allocation_;
};

absl::Status Simulation::Setup() {
  if (m_ < 1) return absl::InvalidArgumentError("net.m must be at least 1");
  if (length_ < 1) return absl::InvalidArgumentError("empty stream");
  observation_q_.assign(d_, 0.0);
  if (config_.data.observation_noise) {
    for (int k = 0; k < d_; ++k) observation_q_[k] = model_.noise_variance(k);
  }
  partition_rng_.emplace(Rng::Derive(config_.seed, StreamTag::kPartition));
  if (absl::Status s = Partition(); !s.ok()) return s;

  std::optional<int64_t> cap;
  if (algorithm_ == Algorithm::kDpCrowdW) {
    cap = SampleCap(config_.sampling.max_fraction, config_.w);
    share_ = AllocateUniform(config_.epsilon, *cap);
  } else if (algorithm_ == Algorithm::kDpCrowdPlus) {
    share_ = AllocateUniform(config_.epsilon,
                             SampleCap(config_.sampling.max_fraction, config_.w));
  } else if (is_private()) {
    cap = SampleCap(config_.sampling.max_fraction, length_);
    share_ = AllocateUniform(config_.epsilon, *cap);
  }
  allocation_ = {config_.mu, config_.p_max,
                 config_.eps_max_fraction * config_.epsilon};

  servers_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    Server& s = servers_[i];
    s.id = i;
    s.state = KcifState::Empty(d_);
    for (int k = 0; k < d_; ++k) {
      s.schedules.emplace_back(config_.sampling.mode, config_.sampling.interval,
                               cap);
      s.pids.emplace_back(config_.pid.gains);
    }
    s.published.assign(d_, {});
    s.last_rhat.assign(d_, 0.0);
    s.last_release.assign(d_, 0.0);
    s.obs_rng = Rng::Derive(config_.seed, StreamTag::kObservation, i);
    s.noise_rng = Rng::Derive(config_.seed, StreamTag::kPerturbation, i);
    if (is_private()) {
      auto ledger = windowed()
                        ? PrivacyLedger::WEvent(config_.epsilon, config_.w, d_)
                        : PrivacyLedger::UserLevel(config_.epsilon, d_);
      if (!ledger.ok()) return ledger.status();
      s.ledger = *std::move(ledger);
    }
  }
  return absl::OkStatus();
}

absl::Status Simulation::Partition() {
  auto sizes = PartitionUsers(config_.n, m_, *partition_rng_);
  if (!sizes.ok()) return sizes.status();
  auto obs = ObservationModel::FromGroupSizes(*sizes);
  if (!obs.ok()) return obs.status();
  h_ = std::move(obs->coefficients);
  return absl::OkStatus();
}

absl::Status Simulation::PhaseOne(Server& s, int64_t t,
                                  std::span<const double> r) {
  const double h = h_[s.id];
  auto x = Observe(h, r, observation_q_, s.obs_rng);
  if (!x.ok()) return x.status();
  RawAggregate raw(*std::move(x));

  if (algorithm_ == Algorithm::kDpCrowdW && t > 1 && (t - 1) % config_.w == 0) {
    for (int k = 0; k < d_; ++k) {
      s.schedules[k].Restart(t);
      s.pids[k] = PidController(config_.pid.gains);
    }
  }

  s.sampled.clear();
  s.z.assign(d_, std::nullopt);
  s.rhat.assign(d_, 0.0);
  const double alpha = config_.kcif.alpha;
  const double sens = config_.sensitivity_c;

  if (!is_private()) {
    std::vector<double> values = ReleaseWithoutPrivacy(std::move(raw));
    for (int k = 0; k < d_; ++k) {
      s.sampled.push_back(k);
      s.z[k] = values[k];
      s.rhat[k] = EffectiveVariance(h, std::nullopt, sens,
                                    model_.noise_variance(k), alpha);
    }
  } else {
    PrivacyLedger& ledger = *s.ledger;
    std::vector<double> budgets(d_, 0.0);
    for (int k = 0; k < d_; ++k) {
      if (!s.schedules[k].IsSamplingPoint(t)) continue;
      double eps = share_;
      if (algorithm_ == Algorithm::kDpCrowdPlus &&
          config_.allocation == AllocationMode::kAdaptive) {
        eps = AllocateAdaptive(ledger, k, t, s.schedules[k].interval(),
                               allocation_);
      }
      if (eps > 0.0 && ledger.CanCharge(k, t, eps)) {
        s.sampled.push_back(k);
        budgets[k] = eps;
      } else {
        s.schedules[k].Postpone(t);
      }
    }
    if (!s.sampled.empty()) {
      GroupPartition partition;
      if (algorithm_ == Algorithm::kDpCrowdPlus && config_.grouping.enabled) {
        std::vector<double> predictions(d_);
        for (int k = 0; k < d_; ++k) {
          predictions[k] =
              h * PredictRegion(s.published[k], config_.grouping.tau);
        }
        double budget_sum = 0.0;
        for (int k : s.sampled) budget_sum += budgets[k];
        GroupingThresholds thresholds = DefaultThresholds(
            sens, budget_sum / static_cast<double>(s.sampled.size()));
        thresholds.history_window = config_.grouping.tau;
        if (config_.grouping.eta1) thresholds.large = *config_.grouping.eta1;
        if (config_.grouping.eta2) thresholds.deviation = *config_.grouping.eta2;
        if (config_.grouping.eta3) thresholds.similarity = *config_.grouping.eta3;
        partition = GroupRegions(s.sampled, predictions, s.published, thresholds);
      } else {
        partition = Singletons(s.sampled);
      }
      auto noisy = PerturbGroups(partition, std::move(raw), budgets, sens,
                                 ledger, t, LaplaceNoise(s.noise_rng));
      if (!noisy.ok()) {
        return absl::InternalError(absl::StrCat(
            "privacy invariant violated at server ", s.id, ", t = ", t, ": ",
            noisy.status().message()));
      }
      for (const std::vector<int>& group : partition.groups) {
        double eps_min = std::numeric_limits<double>::infinity();
        for (int k : group) eps_min = std::min(eps_min, budgets[k]);
        const double b = sens / eps_min;
        const double size = static_cast<double>(group.size());
        const double noise_var = 2.0 * b * b / (size * size);
        for (int k : group) {
          s.z[k] = (*noisy)[k];
          s.rhat[k] = EffectiveVarianceFromNoise(h, noise_var,
                                                 model_.noise_variance(k), alpha);
        }
      }
    }
  }

  if (!s.state.initialized) {
    s.state = InitialState(model_, t, h, s.z, s.rhat);
  } else {
    s.state = Predict(s.state, model_);
  }
  for (int k : s.sampled) s.last_rhat[k] = s.rhat[k];

  s.broadcast = one_hop() && !s.sampled.empty();
  if (s.broadcast) {
    auto msg = BuildMessage(s.id, s.state, h, s.z, s.rhat);
    if (!msg.ok()) return msg.status();
    s.outgoing = *std::move(msg);
  }
  std::vector<std::optional<double>> own_z = s.z;
  std::vector<double> own_rhat = s.rhat;
  if (config_.fuse_stale_self && t > 1) {
    for (int k = 0; k < d_; ++k) {
      if (own_z[k].has_value() || !(s.last_rhat[k] > 0.0)) continue;
      own_z[k] = h * s.last_release[k];
      own_rhat[k] = s.last_rhat[k];
    }
  }
  auto own = BuildMessage(s.id, s.state, h, own_z, own_rhat);
  if (!own.ok()) return own.status();
  s.own = *std::move(own);
  return absl::OkStatus();
}

absl::Status Simulation::PhaseTwo(Server& s, int64_t t,
                                  std::span<const NeighborMessage* const> inbox) {
  auto fusion = Fuse(s.own, inbox);
  if (!fusion.ok()) return fusion.status();
  std::vector<std::span<const double>> priors;
  priors.reserve(inbox.size());
  for (const NeighborMessage* msg : inbox) priors.emplace_back(msg->prior);
  s.state = Update(s.state, *fusion, priors, config_.kcif.beta);

  if (is_private()) {
    for (int k : s.sampled) {
      const double error = FeedbackError(s.state.prior[k], s.state.posterior[k],
                                         config_.pid.delta);
      const double delta = s.pids[k].Update(error, t);
      SamplingSchedule& sched = s.schedules[k];
      sched.RecordSample(t);
      if (sched.mode() == SamplingMode::kAdaptive) {
        int64_t next;
        if (algorithm_ == Algorithm::kDpCrowdPlus) {
          const double remaining = std::max(
              0.0, s.ledger->total() - s.ledger->WindowSpend(k, t));
          next = NextIntervalPlus(sched.interval(), delta, remaining,
                                  config_.pid.theta);
        } else {
          next = NextInterval(sched.interval(), delta, config_.pid.theta,
                              config_.pid.xi);
        }
        sched.SetInterval(next, t);
      }
      std::vector<double>& hist = s.published[k];
      hist.push_back(s.state.posterior[k]);
      const size_t keep = static_cast<size_t>(config_.grouping.tau);
      if (hist.size() > keep) hist.erase(hist.begin(), hist.end() - keep);
    }
  }
  s.release = s.state.posterior;
  if (config_.output.clamp) {
    for (double& v : s.release) v = std::max(v, 0.0);
  }
  s.last_release = s.release;
  return absl::OkStatus();
}

absl::StatusOr<RunResult> Simulation::Execute() {
  if (absl::Status st = Setup(); !st.ok()) return st;
  RunResult result(algorithm_, m_, length_, d_);
  result.set_truth(std::vector<double>(scenario_.truth.values().begin(),
                                       scenario_.truth.values().end()));
  result.observation_coefficients() = h_;
  result.comm().broadcasts_per_server.assign(m_, 0);
  result.trace().resize(length_);

  const bool needs_topology = one_hop() || algorithm_ == Algorithm::kDfast;
  TopologySchedule topology(
      m_, config_.net.rho, config_.net.dynamic,
      Rng::Derive(config_.net.seed.value_or(config_.seed), StreamTag::kTopology));
  Rng latency_rng = Rng::Derive(config_.seed, StreamTag::kLatency);
  const double latency_scale = config_.net.latency_ms_center / 100.0;

  std::vector<std::optional<int64_t>> message_bytes(m_);
  std::vector<const NeighborMessage*> inbox;
  for (int64_t t = 1; t <= length_; ++t) {
    if (config_.partition_dynamic && t > 1) {
      if (absl::Status st = Partition(); !st.ok()) return st;
    }
    const Topology* topo = needs_topology ? &topology.At(t) : nullptr;
    std::span<const double> r = scenario_.truth.row(t - 1);
    TimestampTrace& trace = result.trace()[t - 1];

    for (Server& s : servers_) {
      if (absl::Status st = PhaseOne(s, t, r); !st.ok()) return st;
    }

    OneHopDelivery delivery;
    if (one_hop()) {
      for (int i = 0; i < m_; ++i) {
        message_bytes[i] = servers_[i].broadcast
                               ? std::optional<int64_t>(MessageBytes(d_))
                               : std::nullopt;
        if (servers_[i].broadcast) trace.broadcasters.push_back(i);
      }
      delivery = DeliverOneHop(message_bytes, *topo, latency_rng);
      delivery.latency_ms *= latency_scale;
      Record(result.comm(), delivery.packets, delivery.bytes, delivery.latency_ms);
      trace.packets = delivery.packets;
      trace.bytes = delivery.bytes;
      trace.latency_ms = delivery.latency_ms;
    } else {
      delivery.inbox.assign(m_, {});
    }
    if (topo != nullptr) {
      trace.degrees.resize(m_);
      for (int i = 0; i < m_; ++i) trace.degrees[i] = topo->degree(i);
    }

    // Barrier: every message above was built before any update below.
    for (Server& s : servers_) {
      inbox.clear();
      for (int j : delivery.inbox[s.id]) inbox.push_back(&servers_[j].outgoing);
      if (absl::Status st = PhaseTwo(s, t, inbox); !st.ok()) return st;
      if (s.broadcast) ++result.comm().broadcasts_per_server[s.id];
    }

    std::vector<std::vector<double>> released(m_);
    for (int i = 0; i < m_; ++i) released[i] = servers_[i].release;
    if (algorithm_ == Algorithm::kDfast) {
      FloodResult flood = FloodBroadcast(*topo, FloodPayloadBytes(d_), latency_rng);
      flood.latency_ms *= latency_scale;
      Record(result.comm(), flood.packets, flood.bytes, flood.latency_ms);
      trace.packets = flood.packets;
      trace.bytes = flood.bytes;
      trace.latency_ms = flood.latency_ms;
      for (int i = 0; i < m_; ++i) {
        trace.broadcasters.push_back(i);
        ++result.comm().broadcasts_per_server[i];
        const std::vector<int>& from = flood.received[i];
        for (int k = 0; k < d_; ++k) {
          double sum = 0.0;
          for (int j : from) sum += servers_[j].release[k];
          released[i][k] = sum / static_cast<double>(from.size());
        }
      }
    }

    for (int i = 0; i < m_; ++i) {
      const Server& s = servers_[i];
      for (int k = 0; k < d_; ++k) {
        result.estimate(i, t, k) = released[i][k];
        result.measurement(i, t, k) =
            s.z[k].has_value() ? *s.z[k] : std::numeric_limits<double>::quiet_NaN();
        result.posterior_variance(i, t, k) = s.state.posterior_var[k];
      }
    }
  }

  if (is_private()) {
    for (Server& s : servers_) result.ledgers().push_back(*std::move(s.ledger));
  }
  return result;
}

absl::Status CheckOneDimensional(const Scenario& scenario, absl::string_view name) {
  if (scenario.model.dim() != 1) {
    return absl::InvalidArgumentError(
        absl::StrCat(name, " handles one-dimensional streams only, got d = ",
                     scenario.model.dim()));
  }
  return absl::OkStatus();
}

// Config-supplied A and Q, each falling back to `fallback`.
absl::StatusOr<ProcessModel> ModelFromConfig(const ExperimentConfig& config,
                                             const ProcessModel& fallback) {
  std::vector<double> a = config.model.transition.value_or(std::vector<double>(
      fallback.transition().begin(), fallback.transition().end()));
  std::vector<double> q = config.model.noise_variance.value_or(std::vector<double>(
      fallback.noise_variance().begin(), fallback.noise_variance().end()));
  const int d = fallback.dim();
  if (a.size() != static_cast<size_t>(d) * d || static_cast<int>(q.size()) != d) {
    return absl::InvalidArgumentError(absl::StrCat(
        "model.A must have ", d * d, " entries and model.Q ", d,
        " entries for a ", d, "-dimensional stream"));
  }
  return ProcessModel::Create(std::move(a), std::move(q));
}

absl::StatusOr<RunResult> Simulate(const ExperimentConfig& config,
                                   const Scenario& scenario, Algorithm algorithm) {
  if (absl::Status s = ValidateConfig(config); !s.ok()) return s;
  if (scenario.truth.dim() != scenario.model.dim()) {
    return absl::InvalidArgumentError("data and model dimensions differ");
  }
  Simulation sim(config, scenario, algorithm);
  return sim.Execute();
}

}  // namespace

RunResult::RunResult(Algorithm algorithm, int servers, int64_t length, int dim)
    : algorithm_(algorithm),
      servers_(servers),
      length_(length),
      dim_(dim),
      estimates_(static_cast<size_t>(servers) * length * dim, 0.0),
      measurements_(estimates_.size(), 0.0),
      posterior_variance_(estimates_.size(), 0.0) {}

int64_t SampleCap(double fraction, int64_t length) {
  const double raw = std::floor(fraction * static_cast<double>(length) + 1e-9);
  return std::max<int64_t>(1, static_cast<int64_t>(raw));
}

absl::StatusOr<Scenario> BuildScenario(const ExperimentConfig& config) {
  if (absl::Status s = ValidateConfig(config); !s.ok()) return s;
  Rng rng = Rng::Derive(config.seed, StreamTag::kData);
  std::optional<ProcessModel> model;
  StreamPrefix truth;

  switch (config.data.source) {
    case DataSource::kLinear: {
      auto mm = ModelFromConfig(config, ProcessModel::Scalar(1.0, kLinearVariance));
      if (!mm.ok()) return mm.status();
      model = *std::move(mm);
      const double init[] = {config.data.initial.value_or(kLinearInitial)};
      auto s = GenerateProcess(*model, init, config.T, rng);
      if (!s.ok()) return s.status();
      truth = *std::move(s);
      break;
    }
    case DataSource::kMultiLinear: {
      auto mm = ModelFromConfig(config, DefaultMultiLinearModel());
      if (!mm.ok()) return mm.status();
      model = *std::move(mm);
      auto s = GenerateMultiLinear(
          *model, config.T, config.data.initial.value_or(kMultiLinearInitial), rng);
      if (!s.ok()) return s.status();
      truth = *std::move(s);
      break;
    }
    case DataSource::kFile: {
      auto loaded = LoadCsv(config.data.path);
      if (!loaded.ok()) return loaded.status();
      if (config.T > loaded->length()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "T = ", config.T, " exceeds the ", loaded->length(),
            " rows of ", config.data.path));
      }
      if (config.T > 0 && config.T < loaded->length()) {
        StreamPrefix cut(loaded->dim());
        for (int64_t t = 0; t < config.T; ++t) {
          if (absl::Status s = cut.Append(loaded->row(t)); !s.ok()) return s;
        }
        truth = std::move(cut);
      } else {
        truth = *std::move(loaded);
      }
      const int d = truth.dim();
      std::vector<double> identity(static_cast<size_t>(d) * d, 0.0);
      for (int k = 0; k < d; ++k) identity[k * d + k] = 1.0;
      auto def = ProcessModel::Create(std::move(identity), std::vector<double>(d, 0.0));
      if (!def.ok()) return def.status();
      auto mm = ModelFromConfig(config, *def);
      if (!mm.ok()) return mm.status();
      model = *std::move(mm);
      break;
    }
  }

  if (!config.data.sparse_dims.empty()) {
    const int d = model->dim();
    std::vector<double> scale(d, 1.0);
    for (int k : config.data.sparse_dims) {
      if (k >= d) {
        return absl::InvalidArgumentError(absl::StrCat(
            "data.sparse_dims entry ", k, " is outside the ", d, " dimensions"));
      }
      scale[k] = config.data.sparse_scale;
    }
    std::vector<double> a(static_cast<size_t>(d) * d);
    std::vector<double> q(d);
    for (int k = 0; k < d; ++k) {
      for (int j = 0; j < d; ++j) {
        a[k * d + j] = scale[k] * model->transition(k, j) / scale[j];
      }
      q[k] = scale[k] * scale[k] * model->noise_variance(k);
      if (scale[k] != 1.0) truth.ScaleDimension(k, scale[k]);
    }
    auto scaled = ProcessModel::Create(std::move(a), std::move(q));
    if (!scaled.ok()) return scaled.status();
    model = *std::move(scaled);
  }
  return Scenario{std::move(truth), *std::move(model)};
}

absl::StatusOr<RunResult> RunNonPrivate(const ExperimentConfig& config,
                                        const Scenario& scenario) {
  return Simulate(config, scenario, Algorithm::kNonPrivate);
}

absl::StatusOr<RunResult> RunDpCrowd(const ExperimentConfig& config,
                                     const Scenario& scenario) {
  if (absl::Status s = CheckOneDimensional(scenario, "dpcrowd"); !s.ok()) return s;
  return Simulate(config, scenario, Algorithm::kDpCrowd);
}

absl::StatusOr<RunResult> RunDpCrowdPlus(const ExperimentConfig& config,
                                         const Scenario& scenario) {
  if (config.w < 1) return absl::InvalidArgumentError("w must be at least 1");
  return Simulate(config, scenario, Algorithm::kDpCrowdPlus);
}

absl::StatusOr<RunResult> RunFast(const ExperimentConfig& config,
                                  const Scenario& scenario) {
  return Simulate(config, scenario, Algorithm::kFast);
}

absl::StatusOr<RunResult> RunDfast(const ExperimentConfig& config,
                                   const Scenario& scenario) {
  return Simulate(config, scenario, Algorithm::kDfast);
}

absl::StatusOr<RunResult> RunDpCrowdW(const ExperimentConfig& config,
                                      const Scenario& scenario) {
  if (config.w < 1) return absl::InvalidArgumentError("w must be at least 1");
  return Simulate(config, scenario, Algorithm::kDpCrowdW);
}

absl::StatusOr<RunResult> Run(const ExperimentConfig& config,
                              const Scenario& scenario) {
  switch (config.algorithm) {
    case Algorithm::kNonPrivate:
      return RunNonPrivate(config, scenario);
    case Algorithm::kDpCrowd:
      return RunDpCrowd(config, scenario);
    case Algorithm::kDpCrowdPlus:
      return RunDpCrowdPlus(config, scenario);
    case Algorithm::kFast:
      return RunFast(config, scenario);
    case Algorithm::kDfast:
      return RunDfast(config, scenario);
    case Algorithm::kDpCrowdW:
      return RunDpCrowdW(config, scenario);
  }
  return absl::InvalidArgumentError("unknown algorithm");
}

absl::StatusOr<RunResult> Run(const ExperimentConfig& config) {
  auto scenario = BuildScenario(config);
  if (!scenario.ok()) return scenario.status();
  return Run(config, *scenario);
}

}  // namespace dpcrowd
