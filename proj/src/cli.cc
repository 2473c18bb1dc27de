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

#include <cstdint>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "dpcrowd/config.h"
#include "dpcrowd/datasets.h"
#include "dpcrowd/metrics.h"
#include "dpcrowd/orchestrator.h"
#include "dpcrowd/random.h"
#include "dpcrowd/report.h"

namespace dpcrowd {
namespace {

struct OutputFlags {
  std::string out;
  std::string format;
  std::string trace;
};

void AddOutputFlags(CLI::App* cmd, OutputFlags& flags) {
  cmd->add_option("--out", flags.out, "Report path (default: output.path)");
  cmd->add_option("--format", flags.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--trace", flags.trace, "Per-timestamp trace CSV path");
}

absl::Status Emit(const ExperimentConfig& config, const OutputFlags& flags,
                  std::span<const MetricsReport> rows, std::ostream& out) {
  const std::string format = flags.format.empty() ? config.output.format : flags.format;
  std::string path = flags.out.empty() ? config.output.path : flags.out;
  if (path.empty()) path = absl::StrCat("report.", format);
  if (absl::Status s = WriteReport(rows, format, path); !s.ok()) return s;
  const std::string trace = flags.trace.empty() ? config.output.trace_path : flags.trace;
  if (!trace.empty()) {
    if (absl::Status s = WriteTrace(rows, trace); !s.ok()) return s;
  }
  out << "wrote " << path << "\n";
  return absl::OkStatus();
}

absl::StatusOr<MetricsReport> RunSetting(const ExperimentConfig& base, int64_t runs) {
  std::vector<MetricsReport> reports;
  for (int64_t r = 0; r < runs; ++r) {
    ExperimentConfig c = base;
    c.seed = base.seed + static_cast<uint64_t>(r);
    auto result = Run(c);
    if (!result.ok()) return result.status();
    auto report = Summarize(c, *result);
    if (!report.ok()) return report.status();
    reports.push_back(*std::move(report));
  }
  auto avg = Average(reports);
  if (!avg.ok()) return avg.status();
  avg->seed = base.seed;
  return avg;
}

absl::StatusOr<ExperimentConfig> LoadValid(const std::string& path) {
  auto config = LoadConfig(path);
  if (!config.ok()) return config.status();
  if (absl::Status s = ValidateConfig(*config); !s.ok()) return s;
  return config;
}

absl::Status CmdRun(const std::string& path, const OutputFlags& flags,
                    std::ostream& out) {
  auto config = LoadValid(path);
  if (!config.ok()) return config.status();
  auto report = RunSetting(*config, 1);
  if (!report.ok()) return report.status();
  out << AlgorithmName(config->algorithm) << ": ARE=" << FormatDouble(report->are)
      << " ACE=" << FormatDouble(report->ace)
      << " packets=" << FormatDouble(report->packets) << "\n";
  return Emit(*config, flags, std::span<const MetricsReport>(&*report, 1), out);
}

absl::Status CmdSweep(const std::string& path, const std::string& param,
                      const std::string& values, int64_t runs,
                      const OutputFlags& flags, std::ostream& out) {
  auto config = LoadValid(path);
  if (!config.ok()) return config.status();
  if (runs < 1) return absl::InvalidArgumentError("--runs must be at least 1");
  std::vector<MetricsReport> rows;
  for (absl::string_view raw : absl::StrSplit(values, ',')) {
    const absl::string_view value = absl::StripAsciiWhitespace(raw);
    ExperimentConfig c = *config;
    if (absl::Status s = SetConfigValue(c, param, value); !s.ok()) return s;
    if (absl::Status s = ValidateConfig(c); !s.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(param, " = ", value, ": ", s.message()));
    }
    auto row = RunSetting(c, runs);
    if (!row.ok()) return row.status();
    out << param << "=" << value << ": ARE=" << FormatDouble(row->are)
        << " ACE=" << FormatDouble(row->ace) << "\n";
    rows.push_back(*std::move(row));
  }
  return Emit(*config, flags, rows, out);
}

absl::Status CmdGen(const std::string& kind, const std::string& path,
                    uint64_t seed, int64_t length, std::ostream& out) {
  Rng rng = Rng::Derive(seed, StreamTag::kData);
  absl::StatusOr<StreamPrefix> stream =
      kind == "linear"
          ? GenerateLinear(length, kLinearVariance, kLinearInitial, rng)
          : GenerateMultiLinear(DefaultMultiLinearModel(), length,
                                kMultiLinearInitial, rng);
  if (!stream.ok()) return stream.status();
  if (absl::Status s = WriteCsv(*stream, path); !s.ok()) return s;
  out << "wrote " << path << " (" << stream->length() << " x " << stream->dim()
      << ")\n";
  return absl::OkStatus();
}

absl::Status CmdValidate(const std::string& path, std::ostream& out) {
  auto config = LoadValid(path);
  if (!config.ok()) return config.status();
  auto scenario = BuildScenario(*config);
  if (!scenario.ok()) return scenario.status();
  if (config->algorithm == Algorithm::kDpCrowd && scenario->model.dim() != 1) {
    return absl::InvalidArgumentError("dpcrowd handles one-dimensional streams only");
  }
  out << path << ": ok (" << AlgorithmName(config->algorithm) << ", T="
      << scenario->truth.length() << ", d=" << scenario->model.dim() << ")\n";
  return absl::OkStatus();
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Decentralized private crowd-statistics estimation simulator",
               "dpcrowd"};
  app.require_subcommand(1);

  std::string config_path;
  OutputFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("config", config_path, "Config file")->required();
  AddOutputFlags(run, run_flags);

  std::string sweep_config;
  std::string param;
  std::string values;
  int64_t runs = 1;
  OutputFlags sweep_flags;
  CLI::App* sweep = app.add_subcommand("sweep", "Sweep one config key");
  sweep->add_option("config", sweep_config, "Config file")->required();
  sweep->add_option("--param", param, "Config key to vary")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--runs", runs, "Seeds per value (seed, seed+1, ...)");
  AddOutputFlags(sweep, sweep_flags);

  std::string kind;
  std::string gen_out;
  uint64_t gen_seed = 1;
  int64_t gen_length = kDefaultLength;
  CLI::App* gen = app.add_subcommand("gen", "Write a synthetic stream as CSV");
  gen->add_option("kind", kind, "linear or multilinear")
      ->required()
      ->check(CLI::IsMember({"linear", "multilinear"}));
  gen->add_option("--out", gen_out, "Output CSV path")->required();
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--T", gen_length, "Number of timestamps");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "Check a config file");
  validate->add_option("config", validate_path, "Config file")->required();

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("dpcrowd");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  absl::Status status;
  if (run->parsed()) {
    status = CmdRun(config_path, run_flags, out);
  } else if (sweep->parsed()) {
    status = CmdSweep(sweep_config, param, values, runs, sweep_flags, out);
  } else if (gen->parsed()) {
    status = CmdGen(kind, gen_out, gen_seed, gen_length, out);
  } else if (validate->parsed()) {
    status = CmdValidate(validate_path, out);
  }
  if (!status.ok()) {
    err << "error: " << status.message() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace dpcrowd
