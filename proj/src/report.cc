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

#include "dpcrowd/report.h"

#include <fstream>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "json.hpp"

namespace dpcrowd {
namespace {

using Json = nlohmann::ordered_json;

constexpr int kCsvColumns = 14;

absl::Status WriteFile(const std::string& path, absl::string_view body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out << body;
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("failed writing ", path));
  return absl::OkStatus();
}

}  // namespace

absl::string_view ReportCsvHeader() {
  return "schema_version,algorithm,seed,epsilon,w,rho,m,ARE,ACE,packets,bytes,"
         "max_latency_ms,broadcasts,runs";
}

std::string FormatReportCsv(std::span<const MetricsReport> rows) {
  std::string out = absl::StrCat(ReportCsvHeader(), "\n");
  for (const MetricsReport& r : rows) {
    absl::StrAppend(&out, kReportSchemaVersion, ",", r.algorithm, ",", r.seed,
                    ",", FormatDouble(r.epsilon), ",", r.w, ",",
                    FormatDouble(r.rho), ",", r.m, ",", FormatDouble(r.are),
                    ",", FormatDouble(r.ace), ",", FormatDouble(r.packets), ",",
                    FormatDouble(r.bytes), ",", FormatDouble(r.max_latency_ms),
                    ",", FormatDouble(r.broadcasts), ",", r.runs, "\n");
  }
  return out;
}

std::string FormatReportJson(std::span<const MetricsReport> rows) {
  Json doc;
  doc["schema_version"] = kReportSchemaVersion;
  Json list = Json::array();
  for (const MetricsReport& r : rows) {
    Json row;
    row["algorithm"] = r.algorithm;
    row["seed"] = r.seed;
    row["epsilon"] = r.epsilon;
    row["w"] = r.w;
    row["rho"] = r.rho;
    row["m"] = r.m;
    row["ARE"] = r.are;
    row["ACE"] = r.ace;
    row["packets"] = r.packets;
    row["bytes"] = r.bytes;
    row["max_latency_ms"] = r.max_latency_ms;
    row["broadcasts"] = r.broadcasts;
    row["runs"] = r.runs;
    Json config = Json::object();
    for (const auto& [key, value] : r.config) config[key] = value;
    row["config"] = std::move(config);
    list.push_back(std::move(row));
  }
  doc["rows"] = std::move(list);
  return doc.dump(2) + "\n";
}

absl::Status WriteReport(std::span<const MetricsReport> rows,
                         absl::string_view format, const std::string& path) {
  if (format == "csv") return WriteFile(path, FormatReportCsv(rows));
  if (format == "json") return WriteFile(path, FormatReportJson(rows));
  return absl::InvalidArgumentError(absl::StrCat("unknown report format '", format, "'"));
}

absl::Status WriteTrace(std::span<const MetricsReport> rows,
                        const std::string& path) {
  std::string out = "row,t,relative_error,consensus_error,packets\n";
  for (size_t row = 0; row < rows.size(); ++row) {
    const MetricsReport& r = rows[row];
    for (size_t t = 0; t < r.relative_error_trace.size(); ++t) {
      absl::StrAppend(&out, row, ",", t + 1, ",",
                      FormatDouble(r.relative_error_trace[t]), ",",
                      FormatDouble(r.consensus_error_trace[t]), ",",
                      FormatDouble(t < r.packets_trace.size() ? r.packets_trace[t]
                                                              : 0.0),
                      "\n");
    }
  }
  return WriteFile(path, out);
}

absl::StatusOr<std::vector<MetricsReport>> ParseReportCsv(absl::string_view text) {
  std::vector<MetricsReport> rows;
  int line_no = 0;
  bool header_seen = false;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != ReportCsvHeader()) {
        return absl::InvalidArgumentError("unexpected report header");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells = absl::StrSplit(line, ',');
    if (static_cast<int>(cells.size()) != kCsvColumns) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": expected ", kCsvColumns, " columns"));
    }
    MetricsReport r;
    int version = 0;
    bool ok = absl::SimpleAtoi(cells[0], &version) &&
              version == kReportSchemaVersion;
    r.algorithm = cells[1];
    ok = ok && absl::SimpleAtoi(cells[2], &r.seed) &&
         absl::SimpleAtod(cells[3], &r.epsilon) &&
         absl::SimpleAtoi(cells[4], &r.w) && absl::SimpleAtod(cells[5], &r.rho) &&
         absl::SimpleAtoi(cells[6], &r.m) && absl::SimpleAtod(cells[7], &r.are) &&
         absl::SimpleAtod(cells[8], &r.ace) &&
         absl::SimpleAtod(cells[9], &r.packets) &&
         absl::SimpleAtod(cells[10], &r.bytes) &&
         absl::SimpleAtod(cells[11], &r.max_latency_ms) &&
         absl::SimpleAtod(cells[12], &r.broadcasts) &&
         absl::SimpleAtoi(cells[13], &r.runs);
    if (!ok) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": malformed report row"));
    }
    rows.push_back(std::move(r));
  }
  if (!header_seen) return absl::InvalidArgumentError("empty report");
  return rows;
}

absl::StatusOr<std::vector<MetricsReport>> ParseReportJson(absl::string_view text) {
  Json doc = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return absl::InvalidArgumentError("report is not a JSON object");
  }
  if (doc.value("schema_version", 0) != kReportSchemaVersion) {
    return absl::InvalidArgumentError("unsupported report schema version");
  }
  std::vector<MetricsReport> rows;
  try {
    for (const Json& row : doc.at("rows")) {
      MetricsReport r;
      r.algorithm = row.at("algorithm").get<std::string>();
      r.seed = row.at("seed").get<uint64_t>();
      r.epsilon = row.at("epsilon").get<double>();
      r.w = row.at("w").get<int>();
      r.rho = row.at("rho").get<double>();
      r.m = row.at("m").get<int>();
      r.are = row.at("ARE").get<double>();
      r.ace = row.at("ACE").get<double>();
      r.packets = row.at("packets").get<double>();
      r.bytes = row.at("bytes").get<double>();
      r.max_latency_ms = row.at("max_latency_ms").get<double>();
      r.broadcasts = row.at("broadcasts").get<double>();
      r.runs = row.at("runs").get<int64_t>();
      for (const auto& [key, value] : row.at("config").items()) {
        r.config.emplace_back(key, value.get<std::string>());
      }
      rows.push_back(std::move(r));
    }
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed report: ", e.what()));
  }
  return rows;
}

}  // namespace dpcrowd
