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
#include <nlohmann/json.hpp>
#include <string>

namespace codecwb::cli {

// Artifacts live under the work dir with content-hash-stamped names
// (<subdir>/<stem>-<fnv64 hex>.<ext>); index.json maps logical names to them.
class WorkDir {
 public:
  explicit WorkDir(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  // Scratch path in <subdir> for a file that commit() will stamp.
  std::filesystem::path scratch(const std::string& subdir, const std::string& ext) const;

  // Renames `tmp` to its stamped name and returns the root-relative path.
  // An identical existing artifact is reused.
  std::string commit(const std::filesystem::path& tmp, const std::string& stem);

  nlohmann::json& index() { return index_; }
  const nlohmann::json& index() const { return index_; }

  // Resolved path of index[key] (or index[key][name]); throws Error naming
  // `hint` when absent.
  std::filesystem::path artifact(const std::string& key, const std::string& hint) const;
  std::filesystem::path artifact(const std::string& key, const std::string& name,
                                 const std::string& hint) const;

  void save_index() const;

 private:
  std::filesystem::path root_;
  nlohmann::json index_ = nlohmann::json::object();
};

std::string file_hash(const std::filesystem::path& path);

}  // namespace codecwb::cli
