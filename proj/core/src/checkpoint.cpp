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

#include "codecwb/checkpoint.hpp"

#include <fstream>
#include <sstream>

namespace codecwb {
namespace {

constexpr char kMagic[] = "CODECWB-CHECKPOINT";

template <typename V>
void write_block(std::ostream& out, const V& v) {
  write_f32_le(out, std::span<const float>(v.data(), static_cast<std::size_t>(v.size())));
}

template <typename V>
void read_block(std::istream& in, V& v) {
  read_f32_le(in, std::span<float>(v.data(), static_cast<std::size_t>(v.size())));
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  c.params.validate();
  if (c.optimizer.m.size() != c.params.flat.size() ||
      c.optimizer.v.size() != c.params.flat.size()) {
    throw InvalidArgument("save_checkpoint: optimizer state does not match params");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << kMagic << ' ' << kCheckpointVersion << '\n';
  out << "arch";
  for (int s : c.params.arch) out << ' ' << s;
  out << '\n';
  out << "seed " << c.params.seed << '\n';
  out << "epoch " << c.epoch << '\n';
  out << "dev_metric " << format_double(c.dev_metric) << '\n';
  out << "selection_metric " << c.selection_metric << '\n';
  out << "strategy " << c.strategy << '\n';
  out << "adam_t " << c.optimizer.t << '\n';
  out << "param_count " << c.params.flat.size() << '\n';
  out << "end\n";
  write_block(out, c.params.flat);
  write_block(out, c.params.in_shift);
  write_block(out, c.params.in_scale);
  write_block(out, c.optimizer.m);
  write_block(out, c.optimizer.v);
  if (!out) throw IoError(path.string() + ": write failed");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const std::string src = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(src + ": cannot open file");
  std::string first;
  std::getline(in, first);
  std::istringstream magic(first);
  std::string tag;
  int version = -1;
  magic >> tag >> version;
  if (tag != kMagic) throw FormatError(src + ": not a checkpoint file");
  if (version != kCheckpointVersion) {
    throw VersionError(src + ": checkpoint version " + std::to_string(version) +
                       ", this reader supports " + std::to_string(kCheckpointVersion));
  }
  const auto header = read_text_header(in, src);
  Checkpoint c;
  try {
    std::istringstream arch(header_value(header, "arch", src));
    for (int s; arch >> s;) c.params.arch.push_back(s);
    validate_arch(c.params.arch);
    c.params.seed = std::stoull(header_value(header, "seed", src));
    c.epoch = std::stoi(header_value(header, "epoch", src));
    c.dev_metric = std::stod(header_value(header, "dev_metric", src));
    c.selection_metric = header_value(header, "selection_metric", src);
    c.strategy = header_value(header, "strategy", src);
    c.optimizer.t = std::stoll(header_value(header, "adam_t", src));
    const auto count = std::stoull(header_value(header, "param_count", src));
    if (count != param_count(c.params.arch)) {
      throw FormatError(src + ": param_count does not match arch");
    }
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(src + ": bad checkpoint header: " + e.what());
  }
  const auto n = static_cast<Eigen::Index>(param_count(c.params.arch));
  const int in_dim = c.params.arch.front();
  c.params.flat.resize(n);
  c.params.in_shift.resize(in_dim);
  c.params.in_scale.resize(in_dim);
  c.optimizer.m.resize(n);
  c.optimizer.v.resize(n);
  read_block(in, c.params.flat);
  read_block(in, c.params.in_shift);
  read_block(in, c.params.in_scale);
  read_block(in, c.optimizer.m);
  read_block(in, c.optimizer.v);
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError(src + ": trailing bytes after weight blocks");
  }
  try {
    c.params.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(src + ": " + e.what());
  }
  return c;
}

}  // namespace codecwb
