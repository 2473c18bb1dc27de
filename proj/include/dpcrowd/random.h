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

#ifndef DPCROWD_RANDOM_H_
#define DPCROWD_RANDOM_H_

#include <cstdint>
#include <random>

namespace dpcrowd {

// Logical random streams. Every consumer draws from its own stream so that
// switching algorithms under one seed leaves the data, topology and
// per-server noise draws unchanged.
enum class StreamTag : uint64_t {
  kData = 1,
  kTopology = 2,
  kPartition = 3,
  kObservation = 4,
  kPerturbation = 5,
  kLatency = 6,
  kScenario = 7,
};

// Seeded random source. Raw bits come from std::mt19937_64, whose output
// sequence is fixed by the standard; real-valued transforms are implemented
// here rather than through <random> distributions, which are
// implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Independent stream keyed by (seed, tag, index).
  static Rng Derive(uint64_t seed, StreamTag tag, uint64_t index = 0);

  uint64_t NextU64() { return engine_(); }

  // Uniform on the open interval (0, 1); never returns 0 or 1.
  double Uniform();

  // Uniform on [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n). n must be positive.
  uint64_t UniformInt(uint64_t n);

  bool Bernoulli(double p) { return Uniform() < p; }

  // Standard normal via Box-Muller, consuming exactly two uniforms.
  double Gaussian();

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used for seed derivation.
uint64_t MixBits(uint64_t x);

}  // namespace dpcrowd

#endif  // DPCROWD_RANDOM_H_
