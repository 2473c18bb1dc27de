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

// Experiment configuration and its flat "key = value" file format.
//
// One setting per line, dotted keys for sections, '#' starts a comment.
// Lists are comma separated. Unknown keys are rejected.

#ifndef DPCROWD_CONFIG_H_
#define DPCROWD_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dpcrowd/kcif.h"
#include "dpcrowd/sampling.h"

namespace dpcrowd {

enum class Algorithm {
  kNonPrivate,
  kDpCrowd,
  kDpCrowdPlus,
  kFast,
  kDfast,
  kDpCrowdW,
};

absl::string_view AlgorithmName(Algorithm algorithm);
absl::StatusOr<Algorithm> ParseAlgorithm(absl::string_view name);

enum class DataSource { kLinear, kMultiLinear, kFile };

// How DPCrowd+ sizes each sample's budget.
enum class AllocationMode { kAdaptive, kUniform };

struct SamplingConfig {
  SamplingMode mode = SamplingMode::kAdaptive;
  int64_t interval = 1;
  // Maximum number of sampling points as a fraction of the stream length
  // (of the window length for the windowed baseline).
  double max_fraction = 0.3;
};

struct PidConfig {
  PidGains gains;
  double theta = 2.5;
  double xi = 0.05;
  double delta = 1.0;
};

struct GroupingConfig {
  bool enabled = true;
  // Unset thresholds take the noise-floor defaults.
  std::optional<double> eta1;
  std::optional<double> eta2;
  std::optional<double> eta3;
  int tau = 3;
};

struct NetConfig {
  int m = 50;
  double rho = 0.3;
  bool dynamic = false;
  double latency_ms_center = 100.0;
  // Topology seed; defaults to the experiment seed.
  std::optional<uint64_t> seed;
};

struct DataConfig {
  DataSource source = DataSource::kLinear;
  std::string path;
  // Initial true value; unset means 1e5 for linear and 1e4 for multilinear.
  std::optional<double> initial;
  bool observation_noise = true;
  // Dimensions rescaled by `sparse_scale` after generation.
  std::vector<int> sparse_dims;
  double sparse_scale = 0.01;
};

struct ModelConfig {
  // Row-major transition matrix and diagonal of Q. Unset entries take the
  // data source defaults.
  std::optional<std::vector<double>> transition;
  std::optional<std::vector<double>> noise_variance;
};

struct OutputConfig {
  std::string format = "csv";
  std::string path;
  // Long-format per-timestamp trace; empty disables it.
  std::string trace_path;
  // Clamp released estimates at zero.
  bool clamp = false;
};

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kDpCrowd;
  uint64_t seed = 1;
  // Stream length; 0 takes the whole input file.
  int64_t T = 1000;
  int64_t n = 100000;
  double epsilon = 1.0;
  int w = 20;
  AllocationMode allocation = AllocationMode::kAdaptive;
  double mu = 0.5;
  double p_max = 0.6;
  double eps_max_fraction = 0.5;
  double sensitivity_c = 1.0;
  SamplingConfig sampling;
  PidConfig pid;
  GroupingConfig grouping;
  NetConfig net;
  KcifParams kcif;
  bool fuse_stale_self = false;
  DataConfig data;
  ModelConfig model;
  bool partition_dynamic = false;
  OutputConfig output;
};

// Sets one key. Fails on unknown keys and malformed values.
absl::Status SetConfigValue(ExperimentConfig& config, absl::string_view key,
                            absl::string_view value);

// Parses a whole config file body on top of the defaults. Errors name the
// offending line.
absl::StatusOr<ExperimentConfig> ParseConfig(absl::string_view text);

// Reads and parses `path`, then applies the DPCROWD_SEED environment
// override when it is set.
absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path);

// Cross-field checks that do not need the input data.
absl::Status ValidateConfig(const ExperimentConfig& config);

// Every key with its current value, in a fixed order. Feeding the pairs
// back through SetConfigValue reproduces the config.
std::vector<std::pair<std::string, std::string>> ConfigEcho(
    const ExperimentConfig& config);

// 17 significant digits, enough to parse back to the same double.
std::string FormatDouble(double v);

}  // namespace dpcrowd

#endif  // DPCROWD_CONFIG_H_
