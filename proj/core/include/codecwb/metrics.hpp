// Copyright 2026 The codecwb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "codecwb/common.hpp"

namespace codecwb {

// Scores follow the bonafide-positive convention: higher = more bonafide.
struct EerResult {
  double eer = 0.0;        // fraction in [0, 1]
  double threshold = 0.0;  // the candidate score where it was attained
  double frr = 0.0;        // fraction of bonafide below threshold
  double far = 0.0;        // fraction of spoof at or above threshold
};

// Sweeps every distinct observed score as a threshold and picks the first
// (lowest) one minimizing |FRR - FAR|; eer = (FRR + FAR) / 2 there. The
// comparison is done on exact integer counts.
EerResult compute_eer(std::span<const double> bonafide,
                      std::span<const double> spoof);

struct Confusion {
  std::int64_t tp = 0;  // bonafide predicted bonafide
  std::int64_t fn = 0;  // bonafide predicted spoof
  std::int64_t fp = 0;  // spoof predicted bonafide
  std::int64_t tn = 0;  // spoof predicted spoof

  std::int64_t total() const { return tp + fn + fp + tn; }
  bool operator==(const Confusion&) const = default;
};

// Predicted bonafide iff score >= threshold.
Confusion confusion_matrix(std::span<const double> scores,
                           std::span<const Label> labels,
                           double threshold = 0.5);

struct ConditionEer {
  std::string condition;
  double eer = 0.0;  // fraction
};

struct Aggregates {
  double cavg = 0.0;  // fraction, mean over codec conditions
  double avg = 0.0;   // fraction, mean over all conditions
};

Aggregates aggregate(std::span<const ConditionEer> eers,
                     std::span<const std::string> codec_conditions);

// 100 * fraction with exactly three decimals, e.g. 0.0123456 -> "1.235".
std::string format_percent(double fraction);

inline constexpr int kReportVersion = 1;

struct ConditionResult {
  std::string condition;
  std::string method;
  EerResult eer;
  Confusion confusion;
  std::int64_t n_bonafide = 0;
  std::int64_t n_spoof = 0;
};

struct EvalReport {
  int report_version = kReportVersion;
  std::uint64_t seed = 0;
  std::string checkpoint_id;
  std::string model;
  std::string strategy;
  std::vector<ConditionResult> conditions;
  std::vector<std::string> codec_conditions;
  Aggregates aggregates;

  // Recomputes aggregates from the condition entries.
  void finalize();
};

nlohmann::json to_json(const EvalReport& r);
EvalReport report_from_json(const nlohmann::json& j, const std::string& source);
void save_report(const std::filesystem::path& path, const EvalReport& r);
EvalReport load_report(const std::filesystem::path& path);

}  // namespace codecwb
