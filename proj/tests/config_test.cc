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

#include "dpcrowd/config.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "absl/status/status.h"
#include "gtest/gtest.h"

namespace dpcrowd {
namespace {

ExperimentConfig Parse(const std::string& text) {
  auto c = ParseConfig(text);
  EXPECT_TRUE(c.ok()) << c.status();
  return c.ok() ? *c : ExperimentConfig{};
}

TEST(AlgorithmNameTest, RoundTrips) {
  for (Algorithm a : {Algorithm::kNonPrivate, Algorithm::kDpCrowd,
                      Algorithm::kDpCrowdPlus, Algorithm::kFast,
                      Algorithm::kDfast, Algorithm::kDpCrowdW}) {
    EXPECT_EQ(ParseAlgorithm(AlgorithmName(a)).value(), a);
  }
  EXPECT_EQ(AlgorithmName(Algorithm::kDpCrowdPlus), "dpcrowd_plus");
  EXPECT_FALSE(ParseAlgorithm("kalman").ok());
}

TEST(ParseConfigTest, DefaultsMatchLinearSetup) {
  const ExperimentConfig c = Parse("");
  EXPECT_EQ(c.algorithm, Algorithm::kDpCrowd);
  EXPECT_EQ(c.T, 1000);
  EXPECT_EQ(c.net.m, 50);
  EXPECT_EQ(c.net.rho, 0.3);
  EXPECT_EQ(c.sampling.max_fraction, 0.3);
  EXPECT_EQ(c.pid.gains.cp, 0.9);
  EXPECT_EQ(c.pid.gains.ci, 0.1);
  EXPECT_EQ(c.pid.gains.cd, 0.0);
  EXPECT_EQ(c.pid.gains.integral_window, 5);
  EXPECT_EQ(c.pid.theta, 2.5);
  EXPECT_EQ(c.pid.xi, 0.05);
  EXPECT_TRUE(ValidateConfig(c).ok());
}

TEST(ParseConfigTest, ReadsEveryKind) {
  const ExperimentConfig c = Parse(R"(
# comment line
algorithm = dpcrowd_plus
seed = 77
T = 250            # trailing comment
epsilon = 0.5
w = 40
allocation = uniform
sampling.mode = fixed
sampling.interval = 3
pid.cp = 1
pid.ti = 4
grouping.enabled = false
grouping.eta1 = 12.5
net.m = 10
net.rho = 0.9
net.dynamic = true
net.seed = 5
kcif.beta = 0.01
data.source = multilinear
data.sparse_dims = 4, 5
model.Q = 1,2,3,4,5,6
output.format = json
)");
  EXPECT_EQ(c.algorithm, Algorithm::kDpCrowdPlus);
  EXPECT_EQ(c.seed, 77u);
  EXPECT_EQ(c.T, 250);
  EXPECT_EQ(c.epsilon, 0.5);
  EXPECT_EQ(c.w, 40);
  EXPECT_EQ(c.allocation, AllocationMode::kUniform);
  EXPECT_EQ(c.sampling.mode, SamplingMode::kFixed);
  EXPECT_EQ(c.sampling.interval, 3);
  EXPECT_EQ(c.pid.gains.cp, 1.0);
  EXPECT_EQ(c.pid.gains.integral_window, 4);
  EXPECT_FALSE(c.grouping.enabled);
  EXPECT_EQ(c.grouping.eta1, 12.5);
  EXPECT_EQ(c.net.m, 10);
  EXPECT_TRUE(c.net.dynamic);
  EXPECT_EQ(c.net.seed, 5u);
  EXPECT_EQ(c.kcif.beta, 0.01);
  EXPECT_EQ(c.data.source, DataSource::kMultiLinear);
  EXPECT_EQ(c.data.sparse_dims, (std::vector<int>{4, 5}));
  EXPECT_EQ(c.model.noise_variance, (std::vector<double>{1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(c.output.format, "json");
  EXPECT_TRUE(ValidateConfig(c).ok());
}

TEST(ParseConfigTest, EmptyValueUnsetsOptional) {
  const ExperimentConfig c = Parse("grouping.eta1 = 3\ngrouping.eta1 =\n");
  EXPECT_FALSE(c.grouping.eta1.has_value());
}

TEST(ParseConfigTest, ErrorsNameTheLine) {
  auto c = ParseConfig("seed = 1\nbogus.key = 2\n");
  ASSERT_FALSE(c.ok());
  EXPECT_NE(c.status().message().find("line 2"), std::string::npos);
  EXPECT_NE(c.status().message().find("bogus.key"), std::string::npos);

  c = ParseConfig("epsilon = lots\n");
  ASSERT_FALSE(c.ok());
  EXPECT_NE(c.status().message().find("line 1"), std::string::npos);

  EXPECT_FALSE(ParseConfig("just words\n").ok());
  EXPECT_FALSE(ParseConfig("net.dynamic = maybe\n").ok());
  EXPECT_FALSE(ParseConfig("epsilon = inf\n").ok());
  EXPECT_FALSE(ParseConfig("algorithm = magic\n").ok());
  EXPECT_FALSE(ParseConfig("data.sparse_dims = -1\n").ok());
}

TEST(ValidateConfigTest, RejectsOutOfRange) {
  const std::map<std::string, std::string> bad = {
      {"w = 0\nalgorithm = dpcrowd_plus", "w must be at least 1"},
      {"w = 0\nalgorithm = dpcrowd_w", "w must be at least 1"},
      {"epsilon = 0", "epsilon"},
      {"T = 0", "T = 0"},
      {"net.rho = 0", "net.rho"},
      {"net.rho = 1.5", "net.rho"},
      {"net.m = 0", "net.m"},
      {"kcif.beta = 0", "kcif.beta"},
      {"kcif.alpha = -1", "kcif.alpha"},
      {"p_max = 2", "p_max"},
      {"sensitivity_c = 0.5", "sensitivity_c"},
      {"sampling.max_fraction = 0", "max_fraction"},
      {"pid.ci = -1", "PID gains"},
      {"pid.ti = 0", "pid.ti"},
      {"grouping.eta2 = 0", "grouping thresholds"},
      {"grouping.tau = 0", "grouping.tau"},
      {"data.source = multilinear", "one-dimensional"},
      {"data.source = file", "data.path"},
      {"data.source = file\ndata.path = x.csv", "model.Q"},
      {"output.format = xml", "output.format"},
  };
  for (const auto& [text, fragment] : bad) {
    const ExperimentConfig c = Parse(text);
    const absl::Status s = ValidateConfig(c);
    EXPECT_FALSE(s.ok()) << text;
    EXPECT_NE(s.message().find(fragment), std::string::npos)
        << text << " -> " << s.message();
  }
}

TEST(ValidateConfigTest, WindowIgnoredForUserLevelAlgorithms) {
  EXPECT_TRUE(ValidateConfig(Parse("w = 0\nalgorithm = dpcrowd")).ok());
}

TEST(ConfigEchoTest, ReparsesToSameEcho) {
  const ExperimentConfig c = Parse(
      "algorithm = dfast\nepsilon = 0.1\nmodel.A = 1\nmodel.Q = 3\n"
      "grouping.eta3 = 0.30000000000000004\n");
  const auto echo = ConfigEcho(c);
  std::string text;
  for (const auto& [k, v] : echo) text += k + " = " + v + "\n";
  EXPECT_EQ(ConfigEcho(Parse(text)), echo);
  bool found = false;
  for (const auto& [k, v] : echo) {
    if (k == "grouping.eta3") {
      found = true;
      EXPECT_EQ(v, "0.30000000000000004");
    }
  }
  EXPECT_TRUE(found);
}

TEST(FormatDoubleTest, SeventeenDigits) {
  EXPECT_EQ(FormatDouble(0.1), "0.10000000000000001");
  EXPECT_EQ(FormatDouble(2.0), "2");
}

TEST(LoadConfigTest, SeedOverrideFromEnvironment) {
  const auto path =
      std::filesystem::temp_directory_path() / "dpcrowd_config_test.cfg";
  {
    std::ofstream out(path);
    out << "seed = 3\nepsilon = 0.7\n";
  }
  unsetenv("DPCROWD_SEED");
  EXPECT_EQ(LoadConfig(path.string()).value().seed, 3u);
  setenv("DPCROWD_SEED", "99", 1);
  EXPECT_EQ(LoadConfig(path.string()).value().seed, 99u);
  setenv("DPCROWD_SEED", "nope", 1);
  EXPECT_FALSE(LoadConfig(path.string()).ok());
  unsetenv("DPCROWD_SEED");
  std::filesystem::remove(path);
  EXPECT_EQ(LoadConfig(path.string()).status().code(),
            absl::StatusCode::kNotFound);
}

}  // namespace
}  // namespace dpcrowd
