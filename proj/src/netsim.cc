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

#include "dpcrowd/netsim.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace dpcrowd {
namespace {

// Maximum of `count` independent latencies uniform on [80, 120] ms, drawn
// with a single uniform through the inverse CDF of the maximum.
double MaxLatency(int64_t count, Rng& rng) {
  if (count <= 0) return 0.0;
  const double u = rng.Uniform();
  return kLatencyMinMs + (kLatencyMaxMs - kLatencyMinMs) *
                             std::pow(u, 1.0 / static_cast<double>(count));
}

}  // namespace

absl::StatusOr<Topology> Topology::FromEdges(
    int m, std::span<const std::pair<int, int>> edges) {
  if (m < 1) return absl::InvalidArgumentError("topology needs m >= 1");
  Topology topo(m);
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= m || j >= m || i == j) {
      return absl::InvalidArgumentError(
          absl::StrCat("invalid edge (", i, ", ", j, ")"));
    }
    if (!topo.HasEdge(i, j)) topo.AddEdge(i, j);
  }
  return topo;
}

Topology Topology::Complete(int m) {
  Topology topo(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i != j) topo.adjacency_[i].push_back(j);
    }
  }
  return topo;
}

void Topology::AddEdge(int i, int j) {
  auto insert = [](std::vector<int>& list, int v) {
    list.insert(std::lower_bound(list.begin(), list.end(), v), v);
  };
  insert(adjacency_[i], j);
  insert(adjacency_[j], i);
}

bool Topology::HasEdge(int i, int j) const {
  const auto& list = adjacency_[i];
  return std::binary_search(list.begin(), list.end(), j);
}

int64_t Topology::edge_count() const {
  int64_t degree_sum = 0;
  for (const auto& list : adjacency_) degree_sum += static_cast<int64_t>(list.size());
  return degree_sum / 2;
}

double Topology::density() const {
  const double m = servers();
  if (m < 2) return 0.0;
  return 2.0 * static_cast<double>(edge_count()) / (m * (m - 1.0));
}

bool Topology::HasIsolatedNode() const {
  if (servers() < 2) return false;
  return std::any_of(adjacency_.begin(), adjacency_.end(),
                     [](const auto& list) { return list.empty(); });
}

Topology GenerateTopology(int m, double rho, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      if (rng.Bernoulli(rho)) edges.emplace_back(i, j);
    }
  }
  auto topo = Topology::FromEdges(m, edges);
  // Edges above are always valid.
  Topology out = std::move(topo).value();
  if (m < 2) return out;
  for (int i = 0; i < m; ++i) {
    if (out.degree(i) > 0) continue;
    int other = static_cast<int>(rng.UniformInt(static_cast<uint64_t>(m - 1)));
    if (other >= i) ++other;
    std::pair<int, int> e{i, other};
    edges.push_back(e);
    out = Topology::FromEdges(m, edges).value();
  }
  return out;
}

const Topology& TopologySchedule::At(int64_t t) {
  if (!current_.has_value() || (dynamic_ && t != current_t_)) {
    current_ = GenerateTopology(m_, rho_, rng_);
    current_t_ = t;
  }
  return *current_;
}

int64_t CommStats::total_broadcasts() const {
  return std::accumulate(broadcasts_per_server.begin(),
                         broadcasts_per_server.end(), int64_t{0});
}

OneHopDelivery DeliverOneHop(std::span<const std::optional<int64_t>> message_bytes,
                             const Topology& topology, Rng& latency_rng) {
  const int m = topology.servers();
  OneHopDelivery out;
  out.inbox.resize(m);
  for (int j = 0; j < m; ++j) {
    if (!message_bytes[j].has_value()) continue;
    for (int i : topology.neighbors(j)) {
      out.inbox[i].push_back(j);
      ++out.packets;
      out.bytes += *message_bytes[j];
    }
  }
  // Senders are visited in ascending order, so each inbox is already sorted.
  out.latency_ms = MaxLatency(out.packets, latency_rng);
  return out;
}

FloodResult FloodBroadcast(const Topology& topology, int64_t payload_bytes,
                           Rng& latency_rng) {
  const int m = topology.servers();
  FloodResult out;
  out.received.resize(m);
  // packets_per_round[r] counts forwards made by servers at distance r from
  // their payload's origin.
  std::vector<int64_t> packets_per_round;
  std::vector<int> dist(m);
  std::vector<int> frontier;
  std::vector<int> next;
  for (int s = 0; s < m; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    frontier.assign(1, s);
    int depth = 0;
    while (!frontier.empty()) {
      if (static_cast<int>(packets_per_round.size()) <= depth) {
        packets_per_round.push_back(0);
      }
      next.clear();
      for (int v : frontier) {
        out.received[v].push_back(s);
        packets_per_round[depth] += topology.degree(v);
        for (int w : topology.neighbors(v)) {
          if (dist[w] < 0) {
            dist[w] = depth + 1;
            next.push_back(w);
          }
        }
      }
      if (!next.empty()) out.hops = std::max(out.hops, depth + 1);
      frontier.swap(next);
      ++depth;
    }
  }
  for (int64_t p : packets_per_round) out.packets += p;
  out.bytes = out.packets * payload_bytes;
  // Only the rounds that reach new servers delay delivery.
  for (int r = 0; r < out.hops; ++r) {
    out.latency_ms += MaxLatency(packets_per_round[r], latency_rng);
  }
  for (auto& list : out.received) std::sort(list.begin(), list.end());
  return out;
}

void Record(CommStats& stats, int64_t packets, int64_t bytes, double latency_ms) {
  stats.packets += packets;
  stats.bytes += bytes;
  stats.max_latency_ms = std::max(stats.max_latency_ms, latency_ms);
}

}  // namespace dpcrowd
