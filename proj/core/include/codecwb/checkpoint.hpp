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

#include <filesystem>
#include <string>

#include "codecwb/optim.hpp"

namespace codecwb {

inline constexpr int kCheckpointVersion = 1;

// Plain-text header ("CODECWB-CHECKPOINT <version>", key/value lines, "end")
// followed by little-endian float32 blocks: params, in_shift, in_scale,
// Adam m, Adam v.
struct Checkpoint {
  ModelParams params;
  AdamState<float> optimizer;
  int epoch = 0;
  double dev_metric = 0.0;
  std::string selection_metric = "dev_loss";
  std::string strategy = "erm";
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
// Throws VersionError for another format version, FormatError for corrupt
// or truncated files.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace codecwb
