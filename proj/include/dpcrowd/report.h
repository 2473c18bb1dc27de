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

// Machine-readable run reports.
//
// CSV reports have one summary row per setting under the fixed header
//
//   schema_version,algorithm,seed,epsilon,w,rho,m,ARE,ACE,packets,bytes,
//   max_latency_ms,broadcasts,runs
//
// JSON reports carry the same fields per row plus the full config echo.
// Floating-point values are written with 17 significant digits.

#ifndef DPCROWD_REPORT_H_
#define DPCROWD_REPORT_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dpcrowd/metrics.h"

namespace dpcrowd {

inline constexpr int kReportSchemaVersion = 1;

// The CSV header line, without a trailing newline.
absl::string_view ReportCsvHeader();

std::string FormatReportCsv(std::span<const MetricsReport> rows);
std::string FormatReportJson(std::span<const MetricsReport> rows);

// `format` is "csv" or "json".
absl::Status WriteReport(std::span<const MetricsReport> rows,
                         absl::string_view format, const std::string& path);

// Long-format trace: row,t,relative_error,consensus_error,packets, one line
// per timestamp of every row.
absl::Status WriteTrace(std::span<const MetricsReport> rows,
                        const std::string& path);

// Parse the summary fields back. Traces are not part of a report.
absl::StatusOr<std::vector<MetricsReport>> ParseReportCsv(absl::string_view text);
absl::StatusOr<std::vector<MetricsReport>> ParseReportJson(absl::string_view text);

}  // namespace dpcrowd

#endif  // DPCROWD_REPORT_H_
