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

#include <set>
#include <string>
#include <vector>

#include "codecwb/corpus.hpp"
#include "codecwb/features.hpp"
#include "codecwb/metrics.hpp"
#include "codecwb/optim.hpp"
#include "codecwb/rvq_codec.hpp"

namespace codecwb {

// Pooled log-mel features for every record, rows in manifest order.
FeatureTable extract_feature_table(const Manifest& m, const MelConfig& mel,
                                   double duration_s, int workers = 1);

// Records of one subset (optionally restricted to some domain tags).
Manifest select_subset(const Manifest& m, Subset subset,
                       const std::set<std::string>& domains = {});

// Codec-framed coefficients of every bonafide train-subset record,
// stacked in manifest order.
Frames collect_codec_frames(const Manifest& m, const CodecPreset& p, int workers = 1);

struct ConditionSpec {
  std::string name;    // e.g. "C1"
  std::string method;  // e.g. "F01"
};

// condition_filter -> score -> EER + confusion per condition, then
// aggregates. Records shared between conditions are scored once.
EvalReport evaluate_conditions(const ModelParams& p, const Manifest& m,
                               const std::vector<ConditionSpec>& conditions,
                               const std::vector<std::string>& codec_conditions,
                               const std::set<std::string>& holdout,
                               const MelConfig& mel, double duration_s, int workers = 1);

}  // namespace codecwb
