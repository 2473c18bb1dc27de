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

#include "dpcrowd/datasets.h"

#include <cmath>
#include <filesystem>
#include <string>

#include "gtest/gtest.h"

namespace dpcrowd {
namespace {

TEST(GenerateLinearTest, DefaultLength) {
  Rng rng(1);
  const StreamPrefix s =
      GenerateLinear(kDefaultLength, kLinearVariance, kLinearInitial, rng).value();
  EXPECT_EQ(s.length(), 1000);
  EXPECT_EQ(s.dim(), 1);
  EXPECT_EQ(s.at(0, 0), kLinearInitial);
}

TEST(GenerateLinearTest, ZeroVarianceIsConstant) {
  Rng rng(2);
  const StreamPrefix s = GenerateLinear(100, 0.0, 42.0, rng).value();
  for (int64_t t = 0; t < 100; ++t) EXPECT_EQ(s.at(t, 0), 42.0);
}

TEST(GenerateLinearTest, FirstDifferenceVariance) {
  Rng rng(3);
  const StreamPrefix s =
      GenerateLinear(kDefaultLength, kLinearVariance, kLinearInitial, rng).value();
  const int64_t n = s.length() - 1;
  double sum = 0.0, sq = 0.0;
  for (int64_t t = 1; t < s.length(); ++t) {
    const double d = s.at(t, 0) - s.at(t - 1, 0);
    sum += d;
    sq += d * d;
  }
  const double mean = sum / n;
  const double var = (sq - n * mean * mean) / (n - 1);
  EXPECT_NEAR(var, kLinearVariance, 0.1 * kLinearVariance);
}

TEST(GenerateLinearTest, ClampsAtZero) {
  Rng rng(4);
  const StreamPrefix s = GenerateLinear(2000, 100.0, 0.0, rng).value();
  for (int64_t t = 0; t < s.length(); ++t) EXPECT_GE(s.at(t, 0), 0.0);
  const StreamPrefix neg = GenerateLinear(1, 1.0, -5.0, rng).value();
  EXPECT_EQ(neg.at(0, 0), 0.0);
}

TEST(GenerateLinearTest, RejectsEmptyStream) {
  Rng rng(5);
  EXPECT_FALSE(GenerateLinear(0, 1.0, 1.0, rng).ok());
  EXPECT_FALSE(GenerateLinear(10, -1.0, 1.0, rng).ok());
}

TEST(MultiLinearTest, DefaultModelIsRowStochastic) {
  const ProcessModel m = DefaultMultiLinearModel();
  ASSERT_EQ(m.dim(), 6);
  for (int k = 0; k < 6; ++k) {
    double row = 0.0;
    for (int j = 0; j < 6; ++j) row += m.transition(k, j);
    EXPECT_NEAR(row, 1.0, 1e-15);
    EXPECT_EQ(m.noise_variance(k), kMultiLinearVariance);
  }
}

TEST(MultiLinearTest, IdentityNoiselessIsConstant) {
  std::vector<double> a(36, 0.0);
  for (int k = 0; k < 6; ++k) a[k * 7] = 1.0;
  const ProcessModel m =
      ProcessModel::Create(a, std::vector<double>(6, 0.0)).value();
  Rng rng(6);
  const StreamPrefix s = GenerateMultiLinear(m, 50, 7.0, rng).value();
  for (int64_t t = 0; t < 50; ++t) {
    for (int k = 0; k < 6; ++k) EXPECT_EQ(s.at(t, k), 7.0);
  }
}

TEST(MultiLinearTest, NoDriftBeyondThreeSigma) {
  // The row-stochastic model keeps the cross-dimension mean as a random
  // walk with step variance Q / d; dimensions contract toward that mean.
  const ProcessModel m = DefaultMultiLinearModel();
  const double sigma = std::sqrt(kDefaultLength * kMultiLinearVariance / 6.0);
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    const StreamPrefix s =
        GenerateMultiLinear(m, kDefaultLength, kMultiLinearInitial, rng).value();
    for (int k = 0; k < 6; ++k) {
      double tail = 0.0;
      for (int64_t t = s.length() - 100; t < s.length(); ++t) tail += s.at(t, k);
      EXPECT_LT(std::fabs(tail / 100 - kMultiLinearInitial), 3.0 * sigma)
          << "seed " << seed << " dim " << k;
    }
  }
}

TEST(ParseCsvTest, SingleColumn) {
  const StreamPrefix s = ParseCsv("1\n2\n3").value();
  EXPECT_EQ(s.length(), 3);
  EXPECT_EQ(s.dim(), 1);
  EXPECT_EQ(s.at(2, 0), 3.0);
}

TEST(ParseCsvTest, HeaderSkipped) {
  const StreamPrefix s = ParseCsv("week,count\n1,10\n2,20\n\n").value();
  EXPECT_EQ(s.length(), 2);
  EXPECT_EQ(s.dim(), 2);
  EXPECT_EQ(s.at(1, 1), 20.0);
}

TEST(ParseCsvTest, ErrorsCarryLocation) {
  auto s = ParseCsv("1,2\n3,4\n5\n");
  ASSERT_FALSE(s.ok());
  EXPECT_NE(s.status().message().find("row 3"), std::string::npos);

  s = ParseCsv("a,b\n1,2\n3,x\n");
  ASSERT_FALSE(s.ok());
  EXPECT_NE(s.status().message().find("row 3, column 2"), std::string::npos);

  s = ParseCsv("1\n-2\n");
  ASSERT_FALSE(s.ok());
  EXPECT_NE(s.status().message().find("row 2"), std::string::npos);

  EXPECT_FALSE(ParseCsv("1\nnan\n").ok());
  EXPECT_FALSE(ParseCsv("").ok());
  EXPECT_FALSE(ParseCsv("header only\n").ok());
}

TEST(CsvFileTest, WriteThenLoadIsLossless) {
  Rng rng(7);
  const StreamPrefix s =
      GenerateMultiLinear(DefaultMultiLinearModel(), 40, 123.456, rng).value();
  const auto path = std::filesystem::temp_directory_path() / "dpcrowd_ds.csv";
  ASSERT_TRUE(WriteCsv(s, path.string()).ok());
  const StreamPrefix back = LoadCsv(path.string()).value();
  std::filesystem::remove(path);
  ASSERT_EQ(back.length(), s.length());
  ASSERT_EQ(back.dim(), s.dim());
  for (int64_t t = 0; t < s.length(); ++t) {
    for (int k = 0; k < s.dim(); ++k) EXPECT_EQ(back.at(t, k), s.at(t, k));
  }
}

TEST(CsvFileTest, MissingFileIsNotFound) {
  EXPECT_EQ(LoadCsv("/nonexistent/dir/file.csv").status().code(),
            absl::StatusCode::kNotFound);
  StreamPrefix s(1);
  ASSERT_TRUE(s.Append(std::vector<double>{1.0}).ok());
  EXPECT_FALSE(WriteCsv(s, "/nonexistent/dir/file.csv").ok());
}

}  // namespace
}  // namespace dpcrowd
