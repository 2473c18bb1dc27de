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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"

namespace dpcrowd {

absl::StatusOr<StreamPrefix> GenerateProcess(const ProcessModel& model,
                                             std::span<const double> initial,
                                             int64_t length, Rng& rng) {
  if (static_cast<int>(initial.size()) != model.dim()) {
    return absl::InvalidArgumentError("initial value does not match model dimension");
  }
  if (length < 1) return absl::InvalidArgumentError("stream length must be positive");
  StreamPrefix stream(model.dim());
  TrueState state{0, std::vector<double>(initial.begin(), initial.end())};
  for (double& v : state.r) v = std::max(v, 0.0);
  if (absl::Status s = stream.Append(state.r); !s.ok()) return s;
  for (int64_t t = 1; t < length; ++t) {
    auto next = StepProcess(model, state, rng);
    if (!next.ok()) return next.status();
    state = *std::move(next);
    for (double& v : state.r) v = std::max(v, 0.0);
    if (absl::Status s = stream.Append(state.r); !s.ok()) return s;
  }
  return stream;
}

absl::StatusOr<StreamPrefix> GenerateLinear(int64_t length, double variance,
                                            double initial, Rng& rng) {
  auto model = ProcessModel::Create({1.0}, {variance});
  if (!model.ok()) return model.status();
  const double init[] = {initial};
  return GenerateProcess(*model, init, length, rng);
}

ProcessModel DefaultMultiLinearModel() {
  const int d = kMultiLinearDim;
  std::vector<double> a(d * d, 0.04);
  for (int k = 0; k < d; ++k) a[k * d + k] = 0.8;
  return ProcessModel::Create(std::move(a),
                              std::vector<double>(d, kMultiLinearVariance))
      .value();
}

absl::StatusOr<StreamPrefix> GenerateMultiLinear(const ProcessModel& model,
                                                 int64_t length, double initial,
                                                 Rng& rng) {
  std::vector<double> init(model.dim(), initial);
  return GenerateProcess(model, init, length, rng);
}

absl::StatusOr<StreamPrefix> ParseCsv(absl::string_view text) {
  std::vector<std::vector<double>> rows;
  int width = -1;
  bool first = true;
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    std::vector<absl::string_view> cells = absl::StrSplit(line, ',');
    std::vector<double> values;
    values.reserve(cells.size());
    bool numeric = true;
    for (absl::string_view cell : cells) {
      double v;
      if (!absl::SimpleAtod(absl::StripAsciiWhitespace(cell), &v)) {
        numeric = false;
        break;
      }
      values.push_back(v);
    }
    if (first) {
      first = false;
      width = static_cast<int>(cells.size());
      if (!numeric) continue;  // header
    }
    if (static_cast<int>(cells.size()) != width) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", line_no, ": has ", cells.size(),
                       " columns, expected ", width));
    }
    for (size_t c = 0; c < cells.size(); ++c) {
      double v;
      absl::string_view cell = absl::StripAsciiWhitespace(cells[c]);
      if (!absl::SimpleAtod(cell, &v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("row ", line_no, ", column ", c + 1,
                         ": not a number: '", cell, "'"));
      }
      if (!std::isfinite(v) || v < 0.0) {
        return absl::InvalidArgumentError(
            absl::StrCat("row ", line_no, ", column ", c + 1,
                         ": value must be finite and non-negative, got '",
                         cell, "'"));
      }
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) return absl::InvalidArgumentError("no data rows in CSV input");
  StreamPrefix stream(width);
  for (const auto& row : rows) {
    if (absl::Status s = stream.Append(row); !s.ok()) return s;
  }
  return stream;
}

absl::StatusOr<StreamPrefix> LoadCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  std::stringstream buf;
  buf << in.rdbuf();
  auto stream = ParseCsv(buf.str());
  if (!stream.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": ", stream.status().message()));
  }
  return stream;
}

absl::Status WriteCsv(const StreamPrefix& stream, const std::string& path) {
  std::ofstream out(path);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  for (int k = 0; k < stream.dim(); ++k) out << (k ? "," : "") << "r" << k;
  out << "\n";
  char buf[32];
  for (int64_t t = 0; t < stream.length(); ++t) {
    for (int k = 0; k < stream.dim(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", stream.at(t, k));
      out << (k ? "," : "") << buf;
    }
    out << "\n";
  }
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("failed writing ", path));
  return absl::OkStatus();
}

}  // namespace dpcrowd
