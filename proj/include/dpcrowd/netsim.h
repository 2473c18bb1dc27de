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

// Simulated server network: random topologies by density, synchronous
// one-hop delivery, blind flooding, and communication accounting.

#ifndef DPCROWD_NETSIM_H_
#define DPCROWD_NETSIM_H_

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "dpcrowd/random.h"

namespace dpcrowd {

inline constexpr double kLatencyMinMs = 80.0;
inline constexpr double kLatencyMaxMs = 120.0;

// Undirected simple graph over servers 0..m-1 with sorted adjacency lists.
class Topology {
 public:
  static absl::StatusOr<Topology> FromEdges(
      int m, std::span<const std::pair<int, int>> edges);
  static Topology Complete(int m);

  int servers() const { return static_cast<int>(adjacency_.size()); }
  std::span<const int> neighbors(int i) const { return adjacency_[i]; }
  int degree(int i) const { return static_cast<int>(adjacency_[i].size()); }
  bool HasEdge(int i, int j) const;
  int64_t edge_count() const;
  // 2 |E| / (m (m - 1)).
  double density() const;
  bool HasIsolatedNode() const;

 private:
  explicit Topology(int m) : adjacency_(m) {}
  void AddEdge(int i, int j);

  std::vector<std::vector<int>> adjacency_;
};

// Includes each unordered pair with probability rho, then links every
// isolated server to one uniformly chosen other server.
Topology GenerateTopology(int m, double rho, Rng& rng);

// Topology over time: regenerated every timestamp when `dynamic`, otherwise
// generated once.
class TopologySchedule {
 public:
  TopologySchedule(int m, double rho, bool dynamic, Rng rng)
      : m_(m), rho_(rho), dynamic_(dynamic), rng_(std::move(rng)) {}

  const Topology& At(int64_t t);

  int servers() const { return m_; }
  double rho() const { return rho_; }
  bool dynamic() const { return dynamic_; }

 private:
  int m_;
  double rho_;
  bool dynamic_;
  Rng rng_;
  std::optional<Topology> current_;
  int64_t current_t_ = -1;
};

struct CommStats {
  int64_t packets = 0;
  int64_t bytes = 0;
  // Largest per-timestamp delivery latency seen so far.
  double max_latency_ms = 0.0;
  std::vector<int64_t> broadcasts_per_server;

  int64_t total_broadcasts() const;
};

struct OneHopDelivery {
  // inbox[i] lists the senders whose message reached i, ascending.
  std::vector<std::vector<int>> inbox;
  int64_t packets = 0;
  int64_t bytes = 0;
  double latency_ms = 0.0;
};

// Delivers each broadcasting server's message to all of its neighbors.
// `message_bytes[i]` is the serialized size of server i's message, or empty
// if i stays silent this timestamp. Each delivery draws a latency uniform on
// [80, 120] ms; the timestamp latency is the maximum.
OneHopDelivery DeliverOneHop(std::span<const std::optional<int64_t>> message_bytes,
                             const Topology& topology, Rng& latency_rng);

struct FloodResult {
  // received[i] lists the payload origins held by i, ascending (own
  // included).
  std::vector<std::vector<int>> received;
  int hops = 0;
  int64_t packets = 0;
  int64_t bytes = 0;
  double latency_ms = 0.0;
};

// Blind flooding of one payload per server: the origin sends to all its
// neighbors and every server forwards each newly seen payload to all its
// neighbors once. Relays proceed in synchronous rounds; the latency of a
// round is the maximum of its per-packet latencies and the total latency is
// the sum over rounds.
FloodResult FloodBroadcast(const Topology& topology, int64_t payload_bytes,
                           Rng& latency_rng);

// Accumulates one timestamp's traffic into `stats`.
void Record(CommStats& stats, int64_t packets, int64_t bytes, double latency_ms);

}  // namespace dpcrowd

#endif  // DPCROWD_NETSIM_H_
