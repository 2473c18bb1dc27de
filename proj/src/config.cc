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

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <type_traits>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"

namespace dpcrowd {
namespace {

absl::StatusOr<double> ParseDouble(absl::string_view key, absl::string_view v) {
  double out;
  if (!absl::SimpleAtod(v, &out) || !std::isfinite(out)) {
    return absl::InvalidArgumentError(
        absl::StrCat(key, ": expected a finite number, got '", v, "'"));
  }
  return out;
}

absl::StatusOr<int64_t> ParseInt(absl::string_view key, absl::string_view v) {
  int64_t out;
  if (!absl::SimpleAtoi(v, &out)) {
    return absl::InvalidArgumentError(
        absl::StrCat(key, ": expected an integer, got '", v, "'"));
  }
  return out;
}

absl::StatusOr<bool> ParseBool(absl::string_view key, absl::string_view v) {
  bool out;
  if (!absl::SimpleAtob(v, &out)) {
    return absl::InvalidArgumentError(
        absl::StrCat(key, ": expected true or false, got '", v, "'"));
  }
  return out;
}

absl::StatusOr<std::vector<double>> ParseDoubleList(absl::string_view key,
                                                    absl::string_view v) {
  std::vector<double> out;
  for (absl::string_view part : absl::StrSplit(v, ',')) {
    auto d = ParseDouble(key, absl::StripAsciiWhitespace(part));
    if (!d.ok()) return d.status();
    out.push_back(*d);
  }
  return out;
}

std::string Bool(bool b) { return b ? "true" : "false"; }

std::string DoubleList(const std::vector<double>& v) {
  return absl::StrJoin(v, ",", [](std::string* out, double d) {
    out->append(FormatDouble(d));
  });
}

struct Field {
  const char* key;
  std::function<absl::Status(ExperimentConfig&, absl::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

// Binds a double member.
template <typename Member>
Field DoubleField(const char* key, Member member) {
  return {key,
          [key, member](ExperimentConfig& c, absl::string_view v) -> absl::Status {
            auto d = ParseDouble(key, v);
            if (!d.ok()) return d.status();
            std::invoke(member, c) = *d;
            return absl::OkStatus();
          },
          [member](const ExperimentConfig& c) {
            return FormatDouble(std::invoke(member, c));
          }};
}

template <typename Member>
Field IntField(const char* key, Member member) {
  return {key,
          [key, member](ExperimentConfig& c, absl::string_view v) -> absl::Status {
            auto i = ParseInt(key, v);
            if (!i.ok()) return i.status();
            using T = std::remove_reference_t<decltype(std::invoke(member, c))>;
            if (*i < std::numeric_limits<T>::min() ||
                *i > std::numeric_limits<T>::max()) {
              return absl::InvalidArgumentError(
                  absl::StrCat(key, ": value out of range"));
            }
            std::invoke(member, c) = static_cast<T>(*i);
            return absl::OkStatus();
          },
          [member](const ExperimentConfig& c) {
            return absl::StrCat(std::invoke(member, c));
          }};
}

template <typename Member>
Field BoolField(const char* key, Member member) {
  return {key,
          [key, member](ExperimentConfig& c, absl::string_view v) -> absl::Status {
            auto b = ParseBool(key, v);
            if (!b.ok()) return b.status();
            std::invoke(member, c) = *b;
            return absl::OkStatus();
          },
          [member](const ExperimentConfig& c) {
            return Bool(std::invoke(member, c));
          }};
}

// Optional double; an empty value unsets it.
template <typename Member>
Field OptionalDoubleField(const char* key, Member member) {
  return {key,
          [key, member](ExperimentConfig& c, absl::string_view v) -> absl::Status {
            if (v.empty()) {
              std::invoke(member, c).reset();
              return absl::OkStatus();
            }
            auto d = ParseDouble(key, v);
            if (!d.ok()) return d.status();
            std::invoke(member, c) = *d;
            return absl::OkStatus();
          },
          [member](const ExperimentConfig& c) {
            const auto& o = std::invoke(member, c);
            return o.has_value() ? FormatDouble(*o) : std::string();
          }};
}

template <typename Member>
Field OptionalListField(const char* key, Member member) {
  return {key,
          [key, member](ExperimentConfig& c, absl::string_view v) -> absl::Status {
            if (v.empty()) {
              std::invoke(member, c).reset();
              return absl::OkStatus();
            }
            auto list = ParseDoubleList(key, v);
            if (!list.ok()) return list.status();
            std::invoke(member, c) = *std::move(list);
            return absl::OkStatus();
          },
          [member](const ExperimentConfig& c) {
            const auto& o = std::invoke(member, c);
            return o.has_value() ? DoubleList(*o) : std::string();
          }};
}

template <typename Member>
Field StringField(const char* key, Member member) {
  return {key,
          [member](ExperimentConfig& c, absl::string_view v) -> absl::Status {
            std::invoke(member, c) = std::string(v);
            return absl::OkStatus();
          },
          [member](const ExperimentConfig& c) { return std::invoke(member, c); }};
}

const std::vector<Field>& Fields() {
  static const auto* fields = new std::vector<Field>{
      {"algorithm",
       [](ExperimentConfig& c, absl::string_view v) -> absl::Status {
         auto a = ParseAlgorithm(v);
         if (!a.ok()) return a.status();
         c.algorithm = *a;
         return absl::OkStatus();
       },
       [](const ExperimentConfig& c) {
         return std::string(AlgorithmName(c.algorithm));
       }},
      {"seed",
       [](ExperimentConfig& c, absl::string_view v) -> absl::Status {
         uint64_t s;
         if (!absl::SimpleAtoi(v, &s)) {
           return absl::InvalidArgumentError(
               absl::StrCat("seed: expected a non-negative integer, got '", v, "'"));
         }
         c.seed = s;
         return absl::OkStatus();
       },
       [](const ExperimentConfig& c) { return absl::StrCat(c.seed); }},
      IntField("T", &ExperimentConfig::T),
      IntField("n", &ExperimentConfig::n),
      DoubleField("epsilon", &ExperimentConfig::epsilon),
      IntField("w", &ExperimentConfig::w),
      {"allocation",
       [](ExperimentConfig& c, absl::string_view v) -> absl::Status {
         if (v == "adaptive") {
           c.allocation = AllocationMode::kAdaptive;
         } else if (v == "uniform") {
           c.allocation = AllocationMode::kUniform;
         } else {
           return absl::InvalidArgumentError(absl::StrCat(
               "allocation: expected adaptive or uniform, got '", v, "'"));
         }
         return absl::OkStatus();
       },
       [](const ExperimentConfig& c) {
         return std::string(c.allocation == AllocationMode::kAdaptive
                                ? "adaptive"
                                : "uniform");
       }},
      DoubleField("mu", &ExperimentConfig::mu),
      DoubleField("p_max", &ExperimentConfig::p_max),
      DoubleField("eps_max_fraction", &ExperimentConfig::eps_max_fraction),
      DoubleField("sensitivity_c", &ExperimentConfig::sensitivity_c),
      {"sampling.mode",
       [](ExperimentConfig& c, absl::string_view v) -> absl::Status {
         if (v == "fixed") {
           c.sampling.mode = SamplingMode::kFixed;
         } else if (v == "adaptive") {
           c.sampling.mode = SamplingMode::kAdaptive;
         } else {
           return absl::InvalidArgumentError(absl::StrCat(
               "sampling.mode: expected fixed or adaptive, got '", v, "'"));
         }
         return absl::OkStatus();
       },
       [](const ExperimentConfig& c) {
         return std::string(c.sampling.mode == SamplingMode::kFixed ? "fixed"
                                                                     : "adaptive");
       }},
      IntField("sampling.interval",
               [](auto& c) -> auto& { return c.sampling.interval; }),
      DoubleField("sampling.max_fraction",
                  [](auto& c) -> auto& { return c.sampling.max_fraction; }),
      DoubleField("pid.cp", [](auto& c) -> auto& { return c.pid.gains.cp; }),
      DoubleField("pid.ci", [](auto& c) -> auto& { return c.pid.gains.ci; }),
      DoubleField("pid.cd", [](auto& c) -> auto& { return c.pid.gains.cd; }),
      IntField("pid.ti",
               [](auto& c) -> auto& { return c.pid.gains.integral_window; }),
      DoubleField("pid.theta", [](auto& c) -> auto& { return c.pid.theta; }),
      DoubleField("pid.xi", [](auto& c) -> auto& { return c.pid.xi; }),
      DoubleField("pid.delta", [](auto& c) -> auto& { return c.pid.delta; }),
      BoolField("grouping.enabled",
                [](auto& c) -> auto& { return c.grouping.enabled; }),
      OptionalDoubleField("grouping.eta1",
                          [](auto& c) -> auto& { return c.grouping.eta1; }),
      OptionalDoubleField("grouping.eta2",
                          [](auto& c) -> auto& { return c.grouping.eta2; }),
      OptionalDoubleField("grouping.eta3",
                          [](auto& c) -> auto& { return c.grouping.eta3; }),
      IntField("grouping.tau", [](auto& c) -> auto& { return c.grouping.tau; }),
      IntField("net.m", [](auto& c) -> auto& { return c.net.m; }),
      DoubleField("net.rho", [](auto& c) -> auto& { return c.net.rho; }),
      BoolField("net.dynamic", [](auto& c) -> auto& { return c.net.dynamic; }),
      DoubleField("net.latency_ms_center",
                  [](auto& c) -> auto& { return c.net.latency_ms_center; }),
      {"net.seed",
       [](ExperimentConfig& c, absl::string_view v) -> absl::Status {
         if (v.empty()) {
           c.net.seed.reset();
           return absl::OkStatus();
         }
         uint64_t s;
         if (!absl::SimpleAtoi(v, &s)) {
           return absl::InvalidArgumentError(absl::StrCat(
               "net.seed: expected a non-negative integer, got '", v, "'"));
         }
         c.net.seed = s;
         return absl::OkStatus();
       },
       [](const ExperimentConfig& c) {
         return c.net.seed.has_value() ? absl::StrCat(*c.net.seed) : std::string();
       }},
      DoubleField("kcif.alpha", [](auto& c) -> auto& { return c.kcif.alpha; }),
      DoubleField("kcif.beta", [](auto& c) -> auto& { return c.kcif.beta; }),
      BoolField("kcif.fuse_stale_self",
                [](auto& c) -> auto& { return c.fuse_stale_self; }),
      {"data.source",
       [](ExperimentConfig& c, absl::string_view v) -> absl::Status {
         if (v == "linear") {
           c.data.source = DataSource::kLinear;
         } else if (v == "multilinear") {
           c.data.source = DataSource::kMultiLinear;
         } else if (v == "file") {
           c.data.source = DataSource::kFile;
         } else {
           return absl::InvalidArgumentError(absl::StrCat(
               "data.source: expected linear, multilinear or file, got '", v,
               "'"));
         }
         return absl::OkStatus();
       },
       [](const ExperimentConfig& c) {
         switch (c.data.source) {
           case DataSource::kLinear:
             return std::string("linear");
           case DataSource::kMultiLinear:
             return std::string("multilinear");
           case DataSource::kFile:
             return std::string("file");
         }
         return std::string();
       }},
      StringField("data.path", [](auto& c) -> auto& { return c.data.path; }),
      OptionalDoubleField("data.initial",
                          [](auto& c) -> auto& { return c.data.initial; }),
      BoolField("data.observation_noise",
                [](auto& c) -> auto& { return c.data.observation_noise; }),
      {"data.sparse_dims",
       [](ExperimentConfig& c, absl::string_view v) -> absl::Status {
         c.data.sparse_dims.clear();
         if (v.empty()) return absl::OkStatus();
         for (absl::string_view part : absl::StrSplit(v, ',')) {
           auto k = ParseInt("data.sparse_dims", absl::StripAsciiWhitespace(part));
           if (!k.ok()) return k.status();
           if (*k < 0 || *k > std::numeric_limits<int>::max()) {
             return absl::InvalidArgumentError(
                 "data.sparse_dims: negative dimension index");
           }
           c.data.sparse_dims.push_back(static_cast<int>(*k));
         }
         return absl::OkStatus();
       },
       [](const ExperimentConfig& c) {
         return absl::StrJoin(c.data.sparse_dims, ",");
       }},
      DoubleField("data.sparse_scale",
                  [](auto& c) -> auto& { return c.data.sparse_scale; }),
      OptionalListField("model.A",
                        [](auto& c) -> auto& { return c.model.transition; }),
      OptionalListField("model.Q",
                        [](auto& c) -> auto& { return c.model.noise_variance; }),
      BoolField("partition.dynamic",
                [](auto& c) -> auto& { return c.partition_dynamic; }),
      StringField("output.format", [](auto& c) -> auto& { return c.output.format; }),
      StringField("output.path", [](auto& c) -> auto& { return c.output.path; }),
      StringField("output.trace",
                  [](auto& c) -> auto& { return c.output.trace_path; }),
      BoolField("output.clamp", [](auto& c) -> auto& { return c.output.clamp; }),
  };
  return *fields;
}

bool IsWindowed(Algorithm a) {
  return a == Algorithm::kDpCrowdPlus || a == Algorithm::kDpCrowdW;
}

}  // namespace

absl::string_view AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kNonPrivate:
      return "nonprivate";
    case Algorithm::kDpCrowd:
      return "dpcrowd";
    case Algorithm::kDpCrowdPlus:
      return "dpcrowd_plus";
    case Algorithm::kFast:
      return "fast";
    case Algorithm::kDfast:
      return "dfast";
    case Algorithm::kDpCrowdW:
      return "dpcrowd_w";
  }
  return "unknown";
}

absl::StatusOr<Algorithm> ParseAlgorithm(absl::string_view name) {
  for (Algorithm a : {Algorithm::kNonPrivate, Algorithm::kDpCrowd,
                      Algorithm::kDpCrowdPlus, Algorithm::kFast,
                      Algorithm::kDfast, Algorithm::kDpCrowdW}) {
    if (AlgorithmName(a) == name) return a;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown algorithm '", name, "'"));
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

absl::Status SetConfigValue(ExperimentConfig& config, absl::string_view key,
                            absl::string_view value) {
  for (const Field& f : Fields()) {
    if (key == f.key) return f.set(config, value);
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown config key '", key, "'"));
}

absl::StatusOr<ExperimentConfig> ParseConfig(absl::string_view text) {
  ExperimentConfig config;
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    if (size_t hash = line.find('#'); hash != absl::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": expected 'key = value'"));
    }
    absl::string_view key = absl::StripAsciiWhitespace(line.substr(0, eq));
    absl::string_view value = absl::StripAsciiWhitespace(line.substr(eq + 1));
    absl::Status s = SetConfigValue(config, key, value);
    if (!s.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": ", s.message()));
    }
  }
  return config;
}

absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read config ", path));
  std::stringstream buf;
  buf << in.rdbuf();
  auto config = ParseConfig(buf.str());
  if (!config.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": ", config.status().message()));
  }
  if (const char* env = std::getenv("DPCROWD_SEED"); env != nullptr) {
    absl::Status s = SetConfigValue(*config, "seed", env);
    if (!s.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("DPCROWD_SEED: ", s.message()));
    }
  }
  return config;
}

absl::Status ValidateConfig(const ExperimentConfig& c) {
  auto fail = [](auto&&... parts) {
    return absl::InvalidArgumentError(absl::StrCat(parts...));
  };
  if (c.T < 0) return fail("T must be non-negative");
  if (c.T == 0 && c.data.source != DataSource::kFile) {
    return fail("T = 0 is only allowed with file data");
  }
  if (c.n < 1) return fail("n must be at least 1");
  if (!(c.epsilon > 0.0)) return fail("epsilon must be positive");
  if (IsWindowed(c.algorithm) && c.w < 1) {
    return fail("w must be at least 1 for ", AlgorithmName(c.algorithm));
  }
  if (!(c.mu > 0.0)) return fail("mu must be positive");
  if (!(c.p_max > 0.0 && c.p_max <= 1.0)) return fail("p_max must be in (0, 1]");
  if (!(c.eps_max_fraction > 0.0 && c.eps_max_fraction <= 1.0)) {
    return fail("eps_max_fraction must be in (0, 1]");
  }
  if (!(c.sensitivity_c >= 1.0)) return fail("sensitivity_c must be at least 1");
  if (c.sampling.interval < 1) return fail("sampling.interval must be at least 1");
  if (!(c.sampling.max_fraction > 0.0 && c.sampling.max_fraction <= 1.0)) {
    return fail("sampling.max_fraction must be in (0, 1]");
  }
  const PidGains& g = c.pid.gains;
  if (g.cp < 0.0 || g.ci < 0.0 || g.cd < 0.0) {
    return fail("PID gains must be non-negative");
  }
  if (g.integral_window < 1) return fail("pid.ti must be at least 1");
  if (!(c.pid.theta > 0.0)) return fail("pid.theta must be positive");
  if (!(c.pid.xi > 0.0)) return fail("pid.xi must be positive");
  if (!(c.pid.delta > 0.0)) return fail("pid.delta must be positive");
  for (const auto& eta : {c.grouping.eta1, c.grouping.eta2, c.grouping.eta3}) {
    if (eta.has_value() && !(*eta > 0.0)) {
      return fail("grouping thresholds must be positive");
    }
  }
  if (c.grouping.tau < 1) return fail("grouping.tau must be at least 1");
  if (c.net.m < 1) return fail("net.m must be at least 1");
  if (!(c.net.rho > 0.0 && c.net.rho <= 1.0)) return fail("net.rho must be in (0, 1]");
  if (!(c.net.latency_ms_center > 0.0)) {
    return fail("net.latency_ms_center must be positive");
  }
  if (!(c.kcif.alpha > 0.0)) return fail("kcif.alpha must be positive");
  if (!(c.kcif.beta > 0.0)) return fail("kcif.beta must be positive");
  if (c.data.source == DataSource::kFile) {
    if (c.data.path.empty()) return fail("data.path is required for file data");
    if (!c.model.noise_variance.has_value()) {
      return fail("model.Q is required for file data");
    }
  }
  if (c.data.initial.has_value() && *c.data.initial < 0.0) {
    return fail("data.initial must be non-negative");
  }
  if (!(c.data.sparse_scale > 0.0)) return fail("data.sparse_scale must be positive");
  if (c.algorithm == Algorithm::kDpCrowd &&
      c.data.source == DataSource::kMultiLinear) {
    return fail("dpcrowd handles one-dimensional streams only");
  }
  if (c.output.format != "csv" && c.output.format != "json") {
    return fail("output.format must be csv or json");
  }
  return absl::OkStatus();
}

std::vector<std::pair<std::string, std::string>> ConfigEcho(
    const ExperimentConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Field& f : Fields()) out.emplace_back(f.key, f.get(config));
  return out;
}

}  // namespace dpcrowd
