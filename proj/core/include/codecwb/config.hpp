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

#include "codecwb/features.hpp"
#include "codecwb/optim.hpp"
#include "codecwb/rvq_codec.hpp"

namespace codecwb {

// Minimal TOML: [section] and [dotted.section] headers, key = value with
// strings, integers, floats, booleans and (possibly multi-line) arrays,
// '#' comments. No inline tables, no dates.
struct TomlValue {
  enum class Kind { kString, kInteger, kFloat, kBool, kArray };
  Kind kind = Kind::kString;
  std::string str;
  std::int64_t integer = 0;
  double number = 0.0;
  bool boolean = false;
  std::vector<TomlValue> array;
  int line = 0;

  std::string describe() const;
};

struct TomlTable {
  std::vector<std::pair<std::string, TomlValue>> entries;  // file order
  const TomlValue* find(std::string_view key) const;
  void set(const std::string& key, TomlValue value);
};

struct TomlDocument {
  // "" is the root table.
  std::map<std::string, TomlTable> sections;
};

TomlDocument parse_toml(std::string_view text, const std::string& source);
TomlValue parse_toml_value(std::string_view text, const std::string& source);

// `section.key=value`; the value is read as TOML, falling back to a bare
// string.
void apply_override(TomlDocument& doc, std::string_view assignment);

struct ExperimentConfig {
  std::filesystem::path source;
  std::uint64_t seed = 0;
  int workers = 1;

  std::filesystem::path corpus_dir;
  std::filesystem::path work_dir;
  std::string corpus_domain = "codecfake";
  std::vector<std::filesystem::path> external_manifests;

  MelConfig mel;
  double duration_s = 4.0;

  std::vector<CodecPreset> presets;  // in play, config order
  std::set<std::string> holdout;
  CodebookTrainingOptions codebook_options;

  TrainConfig train;

  // Manifest domain tag -> "codec" or "external". Training uses records of
  // these domains only.
  std::map<std::string, std::string> domains;
  // Condition name -> method tag, e.g. C1 -> F01.
  std::map<std::string, std::string> conditions;
  std::vector<std::string> eval_conditions;

  const CodecPreset& preset(std::string_view name) const;
  std::string condition_method(const std::string& condition) const;
  // Conditions whose method is one of the configured codec presets.
  std::vector<std::string> codec_conditions(std::span<const std::string> listed) const;
};

// Relative paths are resolved against the config file's directory.
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});
ExperimentConfig config_from_toml(const TomlDocument& doc,
                                  const std::filesystem::path& base_dir);

}  // namespace codecwb
