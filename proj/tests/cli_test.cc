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

#include "dpcrowd/cli.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dpcrowd/datasets.h"
#include "dpcrowd/report.h"
#include "gtest/gtest.h"

namespace dpcrowd {
namespace {

namespace fs = std::filesystem;

class CliTest : public testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dpcrowd_cli_" +
            std::string(testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Write(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p.string();
  }

  std::string Read(const std::string& name) {
    std::ifstream in(dir_ / name);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  std::string Path(const std::string& name) { return (dir_ / name).string(); }

  int Cli(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return RunCli(args, out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, RunWritesReport) {
  const std::string cfg = Write("a.cfg", "T = 100\nnet.m = 8\n");
  ASSERT_EQ(Cli({"run", cfg, "--out", Path("r.csv"), "--trace", Path("t.csv")}), 0)
      << err_.str();
  const auto rows = ParseReportCsv(Read("r.csv")).value();
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].algorithm, "dpcrowd");
  EXPECT_EQ(rows[0].m, 8);
  EXPECT_GE(rows[0].are, 0.0);
  const std::string trace = Read("t.csv");
  EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 101);
}

TEST_F(CliTest, RunUsesConfiguredOutput) {
  const std::string cfg = Write(
      "a.cfg", "T = 50\nnet.m = 4\noutput.format = json\noutput.path = " +
                   Path("r.json") + "\n");
  ASSERT_EQ(Cli({"run", cfg}), 0) << err_.str();
  const auto rows = ParseReportJson(Read("r.json")).value();
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].config.empty());
}

TEST_F(CliTest, SweepEmitsOneRowPerValue) {
  const std::string cfg = Write("a.cfg", "T = 60\nnet.m = 5\n");
  ASSERT_EQ(Cli({"sweep", cfg, "--param", "epsilon", "--values",
                 "0.1,0.3,0.5,0.7,1.0", "--runs", "2", "--out", Path("s.csv")}),
            0)
      << err_.str();
  const auto rows = ParseReportCsv(Read("s.csv")).value();
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0].epsilon, 0.1);
  EXPECT_EQ(rows[4].epsilon, 1.0);
  for (const auto& r : rows) {
    EXPECT_EQ(r.runs, 2);
    EXPECT_EQ(r.seed, 1u);
  }
}

TEST_F(CliTest, SweepRejectsInvalidValue) {
  const std::string cfg = Write("a.cfg", "T = 60\nnet.m = 5\n");
  EXPECT_NE(Cli({"sweep", cfg, "--param", "net.rho", "--values", "0.5,2",
                 "--out", Path("s.csv")}),
            0);
  EXPECT_NE(err_.str().find("net.rho"), std::string::npos);
  EXPECT_NE(Cli({"sweep", cfg, "--param", "no.such", "--values", "1"}), 0);
  EXPECT_NE(Cli({"sweep", cfg, "--param", "epsilon", "--values", "1", "--runs",
                 "0"}),
            0);
}

TEST_F(CliTest, GenWritesLoadableCsv) {
  ASSERT_EQ(Cli({"gen", "multilinear", "--out", Path("m.csv"), "--T", "25"}), 0)
      << err_.str();
  const StreamPrefix s = LoadCsv(Path("m.csv")).value();
  EXPECT_EQ(s.length(), 25);
  EXPECT_EQ(s.dim(), 6);
  ASSERT_EQ(Cli({"gen", "linear", "--out", Path("l.csv"), "--seed", "4"}), 0);
  EXPECT_EQ(LoadCsv(Path("l.csv")).value().length(), 1000);
  EXPECT_NE(Cli({"gen", "cubic", "--out", Path("c.csv")}), 0);
}

TEST_F(CliTest, GeneratedFileRunsEndToEnd) {
  ASSERT_EQ(Cli({"gen", "multilinear", "--out", Path("m.csv"), "--T", "40"}), 0);
  const std::string cfg = Write(
      "f.cfg", "algorithm = dpcrowd_plus\ndata.source = file\ndata.path = " +
                   Path("m.csv") + "\nT = 0\nmodel.Q = 1000,1000,1000,1000,1000,1000\n");
  ASSERT_EQ(Cli({"validate", cfg}), 0) << err_.str();
  EXPECT_NE(out_.str().find("T=40, d=6"), std::string::npos);
  ASSERT_EQ(Cli({"run", cfg, "--out", Path("r.csv")}), 0) << err_.str();
}

TEST_F(CliTest, ValidateRejectsZeroWindow) {
  const std::string cfg = Write("w.cfg", "algorithm = dpcrowd_plus\nw = 0\n");
  EXPECT_NE(Cli({"validate", cfg}), 0);
  EXPECT_NE(err_.str().find("w must be at least 1"), std::string::npos);
}

TEST_F(CliTest, ValidateAcceptsGoodConfig) {
  const std::string cfg = Write("ok.cfg", "algorithm = dfast\n");
  EXPECT_EQ(Cli({"validate", cfg}), 0) << err_.str();
}

TEST_F(CliTest, ErrorsExitNonZero) {
  EXPECT_NE(Cli({}), 0);
  EXPECT_NE(Cli({"frobnicate"}), 0);
  EXPECT_NE(Cli({"run"}), 0);
  EXPECT_NE(Cli({"run", Path("missing.cfg")}), 0);
  EXPECT_NE(err_.str().find("missing.cfg"), std::string::npos);
  const std::string cfg = Write("a.cfg", "T = 10\n");
  EXPECT_NE(Cli({"run", cfg, "--bogus"}), 0);
  EXPECT_NE(Cli({"run", cfg, "--format", "xml"}), 0);
  EXPECT_NE(Cli({"run", cfg, "--out", "/nonexistent/dir/r.csv"}), 0);
  const std::string bad = Write("b.cfg", "epsilon = \n");
  EXPECT_NE(Cli({"run", bad}), 0);
  EXPECT_NE(err_.str().find("line 1"), std::string::npos);
}

TEST_F(CliTest, HelpExitsZero) {
  EXPECT_EQ(Cli({"--help"}), 0);
  EXPECT_NE(out_.str().find("sweep"), std::string::npos);
}

TEST_F(CliTest, IdenticalRunsGiveIdenticalBytes) {
  const std::string cfg = Write("a.cfg", "T = 80\nnet.m = 6\nseed = 9\n");
  ASSERT_EQ(Cli({"run", cfg, "--out", Path("1.json"), "--format", "json"}), 0);
  ASSERT_EQ(Cli({"run", cfg, "--out", Path("2.json"), "--format", "json"}), 0);
  EXPECT_EQ(Read("1.json"), Read("2.json"));
}

}  // namespace
}  // namespace dpcrowd
