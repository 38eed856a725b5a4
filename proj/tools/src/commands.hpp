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
#include <optional>
#include <string>
#include <vector>

namespace codecwb::cli {

struct GlobalOptions {
  std::string config;
  std::vector<std::string> sets;  // section.key=value overrides
  int workers = 0;                // 0: WORKBENCH_WORKERS, then config
};

struct TrainOptions {
  std::optional<std::string> strategy;
  std::optional<double> rho;
  std::string manifest;  // default: the indexed manifest
};

struct EvalOptions {
  std::string checkpoint;  // default: the last trained checkpoint
  std::vector<std::string> conditions;
  std::string manifest;
};

struct ReportOptions {
  std::vector<std::string> inputs;
  std::string format = "table";
  std::string output;
};

struct SynthOptions {
  std::uint64_t seed = 0;
  int seeds = 5;
  bool corpus_ratio = false;
  std::vector<std::string> strategies{"erm", "sam", "asam", "csam"};
  std::string output;
  int workers = 0;
};

// Each returns the process exit code; usage and config problems throw
// InvalidArgument / ConfigError, runtime failures other Errors.
int cmd_codebooks(const GlobalOptions& g, const std::vector<std::string>& presets);
int cmd_generate(const GlobalOptions& g);
int cmd_train(const GlobalOptions& g, const TrainOptions& o);
int cmd_eval(const GlobalOptions& g, const EvalOptions& o);
int cmd_report(const ReportOptions& o);
int cmd_synth(const SynthOptions& o);

void log_info(const std::string& message);
void log_warn(const std::string& message);

}  // namespace codecwb::cli
