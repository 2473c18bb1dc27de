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

#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "gtest/gtest.h"

namespace dpcrowd {
namespace {

Topology Path(int m) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < m; ++i) edges.emplace_back(i, i + 1);
  return Topology::FromEdges(m, edges).value();
}

Topology Star(int leaves) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i <= leaves; ++i) edges.emplace_back(0, i);
  return Topology::FromEdges(leaves + 1, edges).value();
}

TEST(TopologyTest, FromEdgesValidates) {
  const std::pair<int, int> self[] = {{1, 1}};
  EXPECT_FALSE(Topology::FromEdges(3, self).ok());
  const std::pair<int, int> out_of_range[] = {{0, 3}};
  EXPECT_FALSE(Topology::FromEdges(3, out_of_range).ok());
  EXPECT_FALSE(Topology::FromEdges(0, {}).ok());
  const std::pair<int, int> dup[] = {{0, 1}, {1, 0}, {0, 1}};
  const Topology t = Topology::FromEdges(3, dup).value();
  EXPECT_EQ(t.edge_count(), 1);
  EXPECT_TRUE(t.HasEdge(1, 0));
  EXPECT_TRUE(t.HasIsolatedNode());
}

TEST(TopologyTest, CompleteGraphHasUnitDensity) {
  const Topology t = Topology::Complete(6);
  EXPECT_EQ(t.edge_count(), 15);
  EXPECT_EQ(t.density(), 1.0);
}

TEST(GenerateTopologyTest, FullDensityIsComplete) {
  Rng rng(1);
  const Topology t = GenerateTopology(20, 1.0, rng);
  EXPECT_EQ(t.density(), 1.0);
}

TEST(GenerateTopologyTest, TwoServersAlwaysConnected) {
  Rng rng(2);
  for (double rho : {0.01, 0.3, 1.0}) {
    const Topology t = GenerateTopology(2, rho, rng);
    EXPECT_TRUE(t.HasEdge(0, 1));
    EXPECT_EQ(t.edge_count(), 1);
  }
}

TEST(GenerateTopologyTest, MeanDensityMatchesTarget) {
  Rng rng(3);
  double sum = 0.0;
  for (int i = 0; i < 100; ++i) sum += GenerateTopology(50, 0.3, rng).density();
  EXPECT_NEAR(sum / 100, 0.3, 0.03);
}

TEST(GenerateTopologyPropertyTest, SymmetricAndNoIsolation) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + static_cast<int>(rng.UniformInt(40));
    const double rho = rng.Uniform(0.001, 1.0);
    const Topology t = GenerateTopology(m, rho, rng);
    EXPECT_FALSE(t.HasIsolatedNode());
    for (int i = 0; i < m; ++i) {
      EXPECT_FALSE(t.HasEdge(i, i));
      for (int j : t.neighbors(i)) EXPECT_TRUE(t.HasEdge(j, i));
    }
  }
}

TEST(GenerateTopologyPropertyTest, RealizedDensityWithinTenPercent) {
  Rng rng(5);
  for (double rho : {0.1, 0.3, 0.5, 0.9}) {
    for (int i = 0; i < 20; ++i) {
      const Topology t = GenerateTopology(50, rho, rng);
      EXPECT_NEAR(t.density(), rho, 0.1 * rho + 0.01) << rho;
    }
  }
}

TEST(TopologyScheduleTest, StaticKeepsGraph) {
  TopologySchedule s(30, 0.2, false, Rng(6));
  const int64_t edges = s.At(1).edge_count();
  std::vector<int> n0(s.At(1).neighbors(0).begin(), s.At(1).neighbors(0).end());
  for (int64_t t = 2; t < 50; ++t) {
    EXPECT_EQ(s.At(t).edge_count(), edges);
    EXPECT_EQ(std::vector<int>(s.At(t).neighbors(0).begin(),
                               s.At(t).neighbors(0).end()),
              n0);
  }
}

TEST(TopologyScheduleTest, DynamicRegeneratesPerTimestamp) {
  TopologySchedule s(30, 0.2, true, Rng(7));
  int changes = 0;
  int64_t prev = s.At(1).edge_count();
  for (int64_t t = 2; t < 30; ++t) {
    const int64_t e = s.At(t).edge_count();
    EXPECT_EQ(s.At(t).edge_count(), e);
    if (e != prev) ++changes;
    prev = e;
  }
  EXPECT_GT(changes, 10);
}

TEST(DeliverOneHopTest, StarCenterReachesLeaves) {
  Rng rng(8);
  std::vector<std::optional<int64_t>> msgs(5);
  msgs[0] = 36;
  const auto d = DeliverOneHop(msgs, Star(4), rng);
  EXPECT_EQ(d.packets, 4);
  EXPECT_EQ(d.bytes, 4 * 36);
  for (int i = 1; i <= 4; ++i) EXPECT_EQ(d.inbox[i], std::vector<int>{0});
  EXPECT_TRUE(d.inbox[0].empty());
}

TEST(DeliverOneHopTest, SilentTimestampCostsNothing) {
  Rng rng(9);
  const std::vector<std::optional<int64_t>> msgs(5);
  const auto d = DeliverOneHop(msgs, Star(4), rng);
  EXPECT_EQ(d.packets, 0);
  EXPECT_EQ(d.latency_ms, 0.0);
}

TEST(DeliverOneHopPropertyTest, PacketsEqualDegreeSumOfBroadcasters) {
  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const Topology t = GenerateTopology(50, rng.Uniform(0.05, 1.0), rng);
    std::vector<std::optional<int64_t>> msgs(50);
    int64_t degree_sum = 0;
    for (int i = 0; i < 50; ++i) {
      if (rng.Bernoulli(0.5)) {
        msgs[i] = 36;
        degree_sum += t.degree(i);
      }
    }
    const auto d = DeliverOneHop(msgs, t, rng);
    EXPECT_EQ(d.packets, degree_sum);
    EXPECT_EQ(d.bytes, 36 * degree_sum);
    for (int i = 0; i < 50; ++i) {
      std::vector<int> expected;
      for (int j : t.neighbors(i)) {
        if (msgs[j].has_value()) expected.push_back(j);
      }
      EXPECT_EQ(d.inbox[i], expected);
    }
    if (d.packets > 0) {
      EXPECT_GE(d.latency_ms, kLatencyMinMs);
      EXPECT_LE(d.latency_ms, kLatencyMaxMs);
    }
  }
}

TEST(DeliverOneHopTest, AllBroadcastGivesTotalDegree) {
  Rng rng(11);
  const Topology t = GenerateTopology(50, 0.3, rng);
  const std::vector<std::optional<int64_t>> msgs(50, 36);
  EXPECT_EQ(DeliverOneHop(msgs, t, rng).packets, 2 * t.edge_count());
}

TEST(DeliverOneHopTest, LatencyMaxGrowsWithPackets) {
  // The maximum of many uniforms sits near the upper bound.
  Rng rng(12);
  const Topology t = Topology::Complete(50);
  const std::vector<std::optional<int64_t>> msgs(50, 36);
  double sum = 0.0;
  for (int i = 0; i < 100; ++i) sum += DeliverOneHop(msgs, t, rng).latency_ms;
  EXPECT_GT(sum / 100, 119.9);
}

TEST(FloodBroadcastTest, CompleteGraphOneHop) {
  Rng rng(13);
  const auto f = FloodBroadcast(Topology::Complete(3), 20, rng);
  EXPECT_EQ(f.hops, 1);
  for (const auto& r : f.received) EXPECT_EQ(r, (std::vector<int>{0, 1, 2}));
  // Every node forwards every payload to both neighbours.
  EXPECT_EQ(f.packets, 3 * 3 * 2);
  EXPECT_EQ(f.bytes, f.packets * 20);
}

TEST(FloodBroadcastTest, PathDiameterHops) {
  Rng rng(14);
  const auto f = FloodBroadcast(Path(4), 20, rng);
  EXPECT_EQ(f.hops, 3);
  for (const auto& r : f.received) EXPECT_EQ(r, (std::vector<int>{0, 1, 2, 3}));
  // Each payload is forwarded once by every node over all its edges.
  EXPECT_EQ(f.packets, 4 * (1 + 2 + 2 + 1));
}

TEST(FloodBroadcastTest, DisconnectedReachesOnlyComponent) {
  Rng rng(15);
  const std::pair<int, int> edges[] = {{0, 1}, {2, 3}};
  const auto f =
      FloodBroadcast(Topology::FromEdges(4, edges).value(), 20, rng);
  EXPECT_EQ(f.received[0], (std::vector<int>{0, 1}));
  EXPECT_EQ(f.received[3], (std::vector<int>{2, 3}));
  EXPECT_EQ(f.hops, 1);
}

TEST(FloodBroadcastTest, LatencyGrowsWithDiameter) {
  Rng rng(16);
  for (int m : {3, 6, 12}) {
    const Topology t = Path(m);
    const std::vector<std::optional<int64_t>> all(m, 20);
    const auto one_hop = DeliverOneHop(all, t, rng);
    const auto flood = FloodBroadcast(t, 20, rng);
    EXPECT_GE(flood.latency_ms, one_hop.latency_ms);
    EXPECT_GE(flood.latency_ms, kLatencyMinMs * (m - 1));
    EXPECT_LE(flood.latency_ms, kLatencyMaxMs * (m - 1));
    EXPECT_GE(flood.packets, one_hop.packets);
  }
}

TEST(FloodBroadcastPropertyTest, ReachesBfsSetAndOutweighsOneHop) {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + static_cast<int>(rng.UniformInt(30));
    const Topology t = GenerateTopology(m, rng.Uniform(0.05, 1.0), rng);
    const auto f = FloodBroadcast(t, 20, rng);
    int64_t expected_packets = 0;
    for (int s = 0; s < m; ++s) {
      std::vector<bool> seen(m, false);
      std::queue<int> q;
      q.push(s);
      seen[s] = true;
      while (!q.empty()) {
        const int v = q.front();
        q.pop();
        expected_packets += t.degree(v);
        for (int w : t.neighbors(v)) {
          if (!seen[w]) {
            seen[w] = true;
            q.push(w);
          }
        }
      }
      for (int v = 0; v < m; ++v) {
        const auto& r = f.received[v];
        EXPECT_EQ(std::binary_search(r.begin(), r.end(), s), seen[v]);
      }
    }
    EXPECT_EQ(f.packets, expected_packets);
    EXPECT_LE(f.hops, m - 1);
    EXPECT_GE(f.packets, 2 * t.edge_count());
  }
}

TEST(CommStatsTest, RecordAccumulates) {
  CommStats s;
  Record(s, 3, 30, 90.0);
  Record(s, 2, 20, 85.0);
  EXPECT_EQ(s.packets, 5);
  EXPECT_EQ(s.bytes, 50);
  EXPECT_EQ(s.max_latency_ms, 90.0);
  s.broadcasts_per_server = {1, 2, 3};
  EXPECT_EQ(s.total_broadcasts(), 6);
}

}  // namespace
}  // namespace dpcrowd
