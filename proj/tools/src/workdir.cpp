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


#include "workdir.hpp"

#include <codecwb/common.hpp>
#include <fstream>
#include <iterator>
#include <sstream>

namespace codecwb::cli {
namespace fs = std::filesystem;

namespace {

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string file_hash(const fs::path& path) {
  return hex64(fnv1a64(read_bytes(path)));
}

WorkDir::WorkDir(fs::path root) : root_(fs::absolute(std::move(root)).lexically_normal()) {
  const fs::path index_path = root_ / "index.json";
  if (!fs::exists(index_path)) return;
  try {
    index_ = nlohmann::json::parse(read_bytes(index_path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(index_path.string() + ": " + e.what());
  }
  if (!index_.is_object()) throw FormatError(index_path.string() + ": not a JSON object");
}

fs::path WorkDir::scratch(const std::string& subdir, const std::string& ext) const {
  const fs::path dir = root_ / subdir;
  fs::create_directories(dir);
  return dir / (".partial." + ext);
}

std::string WorkDir::commit(const fs::path& tmp, const std::string& stem) {
  const std::string ext = tmp.filename().string().substr(std::string(".partial.").size());
  const fs::path target = tmp.parent_path() / (stem + "-" + file_hash(tmp) + "." + ext);
  if (fs::exists(target) && read_bytes(target) == read_bytes(tmp)) {
    fs::remove(tmp);
  } else {
    fs::rename(tmp, target);
  }
  return target.lexically_relative(root_).generic_string();
}

fs::path WorkDir::artifact(const std::string& key, const std::string& hint) const {
  auto it = index_.find(key);
  if (it == index_.end() || !it->is_string()) {
    throw Error("no " + key + " recorded in " + (root_ / "index.json").string() + "; run `" +
                hint + "` first");
  }
  return root_ / it->get<std::string>();
}

fs::path WorkDir::artifact(const std::string& key, const std::string& name,
                           const std::string& hint) const {
  auto it = index_.find(key);
  if (it == index_.end() || !it->is_object() || !it->contains(name) ||
      !(*it)[name].is_string()) {
    throw Error("no " + key + " entry for '" + name + "' in " +
                (root_ / "index.json").string() + "; run `" + hint + "` first");
  }
  return root_ / (*it)[name].get<std::string>();
}

void WorkDir::save_index() const {
  fs::create_directories(root_);
  const fs::path tmp = root_ / ".index.json.partial";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError(tmp.string() + ": cannot write");
    out << index_.dump(2) << '\n';
    if (!out) throw IoError(tmp.string() + ": write failed");
  }
  fs::rename(tmp, root_ / "index.json");
}

}  // namespace codecwb::cli
