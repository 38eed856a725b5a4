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
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "codecwb/common.hpp"
#include "codecwb/rvq_codec.hpp"

namespace codecwb {

enum class Subset { kUnset, kTrain, kDev, kEval };

std::string_view to_string(Subset s);  // "" for kUnset
Subset parse_subset(std::string_view text);

inline constexpr std::string_view kRealMethod = "real";

struct UttRecord {
  std::string utt_id;
  std::filesystem::path path;
  Label label = Label::kBonafide;
  std::string domain;
  std::string method;
  Subset subset = Subset::kUnset;

  bool operator==(const UttRecord&) const = default;
};

// Fakes are named "<source utt_id>#<method>"; a real record is its own
// source.
std::string source_id(const UttRecord& r);

struct Provenance {
  std::uint64_t seed = 0;
  std::string tool_version;
  bool operator==(const Provenance&) const = default;
};

struct Manifest {
  std::vector<UttRecord> records;
  Provenance provenance;

  // Unique utt_ids; label bonafide iff method "real".
  void validate() const;
  std::size_t count(std::string_view method, Subset subset) const;
  bool operator==(const Manifest&) const = default;
};

struct ScanResult {
  Manifest manifest;
  std::vector<std::string> warnings;  // unreadable files that were skipped
};

// One bonafide record per readable .wav under `dir` (recursive), sorted by
// relative path; utt_id is the relative path without extension.
ScanResult scan_real(const std::filesystem::path& dir,
                     const std::string& domain = "codecfake");

// Shuffles source utterances with the "split" stream of `seed`; dev and eval
// each get ceil(n/10) sources, train the rest. Every record follows its
// source's subset.
Manifest split_manifest(const Manifest& m, std::uint64_t seed);

struct GenerateResult {
  Manifest manifest;  // input reals followed by fakes, preset by preset
  std::vector<std::string> failures;
};

// Transcodes every real record through every preset and writes
// out_dir/<preset>/<utt_id>.wav. Fakes inherit the source subset, except
// holdout presets whose fakes all go to eval. Per-file failures are
// collected; generation continues.
GenerateResult generate_fakes(const Manifest& m,
                              const std::vector<CodecPreset>& presets,
                              const std::map<std::string, CodebookSet>& codebooks,
                              const std::set<std::string>& holdout,
                              const std::filesystem::path& out_dir, int workers = 1);

// Eval-subset bonafide records plus the spoof records of `method`: eval-only
// for seen methods, every subset for holdout methods.
Manifest condition_filter(const Manifest& m, const std::string& method,
                          const std::set<std::string>& holdout = {});

// CSV with header utt_id,path,label,domain,method,subset and '#' provenance
// comments. Paths are written relative to the manifest's directory and
// resolved against it on load.
void write_manifest(const std::filesystem::path& path, const Manifest& m);
std::string manifest_to_csv(const Manifest& m, const std::filesystem::path& base_dir);
Manifest read_manifest(const std::filesystem::path& path);

}  // namespace codecwb
