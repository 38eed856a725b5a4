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

#include "codecwb/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "codecwb/thread_pool.hpp"

namespace codecwb {
namespace {

constexpr char kHeader[] = "utt_id,path,label,domain,method,subset";

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line, const std::string& where) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw FormatError(where + ": unterminated quote");
  return fields;
}

std::string generic_relative(const std::filesystem::path& p,
                             const std::filesystem::path& base) {
  if (base.empty()) return p.generic_string();
  return std::filesystem::absolute(p).lexically_normal().lexically_relative(base).generic_string();
}

}  // namespace

std::string_view to_string(Subset s) {
  switch (s) {
    case Subset::kTrain: return "train";
    case Subset::kDev: return "dev";
    case Subset::kEval: return "eval";
    case Subset::kUnset: break;
  }
  return "";
}

Subset parse_subset(std::string_view text) {
  if (text.empty()) return Subset::kUnset;
  if (text == "train") return Subset::kTrain;
  if (text == "dev") return Subset::kDev;
  if (text == "eval") return Subset::kEval;
  throw FormatError("unknown subset '" + std::string(text) + "'");
}

std::string source_id(const UttRecord& r) {
  const auto hash = r.utt_id.rfind('#');
  return hash == std::string::npos ? r.utt_id : r.utt_id.substr(0, hash);
}

void Manifest::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    if (r.utt_id.empty()) throw FormatError("manifest: empty utt_id");
    if (!seen.insert(r.utt_id).second) {
      throw FormatError("manifest: duplicate utt_id '" + r.utt_id + "'");
    }
    if ((r.label == Label::kBonafide) != (r.method == kRealMethod)) {
      throw FormatError("manifest: record '" + r.utt_id + "' has label " +
                        std::string(to_string(r.label)) + " but method '" + r.method + "'");
    }
  }
}

std::size_t Manifest::count(std::string_view method, Subset subset) const {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(),
      [&](const UttRecord& r) { return r.method == method && r.subset == subset; }));
}

ScanResult scan_real(const std::filesystem::path& dir, const std::string& domain) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError(dir.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".wav") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [&](const fs::path& a, const fs::path& b) {
    return a.lexically_relative(dir).generic_string() <
           b.lexically_relative(dir).generic_string();
  });

  ScanResult out;
  for (const auto& f : files) {
    try {
      probe_wav(f);
    } catch (const Error& e) {
      out.warnings.push_back(e.what());
      continue;
    }
    UttRecord r;
    auto rel = f.lexically_relative(dir);
    r.utt_id = rel.replace_extension().generic_string();
    r.path = fs::absolute(f).lexically_normal();
    r.label = Label::kBonafide;
    r.domain = domain;
    r.method = std::string(kRealMethod);
    out.manifest.records.push_back(std::move(r));
  }
  if (out.manifest.records.empty()) {
    throw InvalidArgument(dir.string() + ": no readable WAV files");
  }
  out.manifest.validate();
  return out;
}

Manifest split_manifest(const Manifest& m, std::uint64_t seed) {
  std::vector<std::string> sources;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& r : m.records) {
    const auto s = source_id(r);
    if (index.emplace(s, sources.size()).second) sources.push_back(s);
  }
  const std::size_t n = sources.size();
  if (n < 10) {
    throw InvalidArgument("split_manifest: need at least 10 source utterances, got " +
                          std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(order);

  const std::size_t held = (n + 9) / 10;
  std::vector<Subset> subset_of(n, Subset::kTrain);
  for (std::size_t k = 0; k < held; ++k) subset_of[order[k]] = Subset::kDev;
  for (std::size_t k = held; k < 2 * held; ++k) subset_of[order[k]] = Subset::kEval;

  Manifest out = m;
  out.provenance.seed = seed;
  for (auto& r : out.records) r.subset = subset_of[index.at(source_id(r))];
  return out;
}

GenerateResult generate_fakes(const Manifest& m,
                              const std::vector<CodecPreset>& presets,
                              const std::map<std::string, CodebookSet>& codebooks,
                              const std::set<std::string>& holdout,
                              const std::filesystem::path& out_dir, int workers) {
  namespace fs = std::filesystem;
  m.validate();
  for (const auto& r : m.records) {
    if (r.label != Label::kBonafide) {
      throw InvalidArgument("generate_fakes: input manifest must contain only bonafide records");
    }
    if (r.subset == Subset::kUnset) {
      throw InvalidArgument("generate_fakes: record '" + r.utt_id + "' has no subset");
    }
  }
  for (const auto& p : presets) {
    auto it = codebooks.find(p.name);
    if (it == codebooks.end()) {
      throw InvalidArgument("generate_fakes: no codebooks for preset " + p.name);
    }
    if (!(it->second.preset == p)) {
      throw InvalidArgument("generate_fakes: codebooks for " + p.name +
                            " were trained for a different preset definition");
    }
  }

  const std::size_t n_real = m.records.size();
  const std::size_t jobs = n_real * presets.size();
  std::vector<UttRecord> fakes(jobs);
  std::vector<std::string> errors(jobs);
  for (const auto& p : presets) fs::create_directories(out_dir / p.name);

  parallel_for(jobs, workers, [&](std::size_t job) {
    const auto& p = presets[job / n_real];
    const auto& src = m.records[job % n_real];
    UttRecord fake;
    fake.utt_id = src.utt_id + "#" + p.name;
    fake.path = fs::absolute(out_dir / p.name / (src.utt_id + ".wav")).lexically_normal();
    fake.label = Label::kSpoof;
    fake.domain = src.domain;
    fake.method = p.name;
    fake.subset = holdout.contains(p.name) ? Subset::kEval : src.subset;
    try {
      const Waveform w = read_wav(src.path);
      fs::create_directories(fake.path.parent_path());
      write_wav(fake.path, transcode(w, codebooks.at(p.name)));
      fakes[job] = std::move(fake);
    } catch (const std::exception& e) {
      errors[job] = p.name + " " + src.utt_id + ": " + e.what();
    }
  });

  GenerateResult out;
  out.manifest.provenance = m.provenance;
  out.manifest.records = m.records;
  for (std::size_t j = 0; j < jobs; ++j) {
    if (errors[j].empty()) {
      out.manifest.records.push_back(std::move(fakes[j]));
    } else {
      out.failures.push_back(std::move(errors[j]));
    }
  }
  out.manifest.validate();
  return out;
}

Manifest condition_filter(const Manifest& m, const std::string& method,
                          const std::set<std::string>& holdout) {
  if (method == kRealMethod) throw InvalidArgument("condition_filter: 'real' is not a condition");
  const bool held_out = holdout.contains(method);
  Manifest out;
  out.provenance = m.provenance;
  bool found = false;
  for (const auto& r : m.records) {
    if (r.label == Label::kBonafide) {
      if (r.subset == Subset::kEval) out.records.push_back(r);
    } else if (r.method == method) {
      found = true;
      if (held_out || r.subset == Subset::kEval) out.records.push_back(r);
    }
  }
  if (!found) throw InvalidArgument("condition_filter: unknown condition '" + method + "'");
  return out;
}

std::string manifest_to_csv(const Manifest& m, const std::filesystem::path& base_dir) {
  std::ostringstream out;
  out << "# seed=" << m.provenance.seed << '\n';
  out << "# tool=" << m.provenance.tool_version << '\n';
  out << kHeader << '\n';
  for (const auto& r : m.records) {
    out << csv_field(r.utt_id) << ',' << csv_field(generic_relative(r.path, base_dir)) << ','
        << to_string(r.label) << ',' << csv_field(r.domain) << ',' << csv_field(r.method)
        << ',' << to_string(r.subset) << '\n';
  }
  return out.str();
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  m.validate();
  const auto base = std::filesystem::absolute(path).parent_path();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << manifest_to_csv(m, base);
  if (!out) throw IoError(path.string() + ": write failed");
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open file");
  const auto base = std::filesystem::absolute(path).parent_path();
  Manifest m;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(1, eq - 1);
        key.erase(0, key.find_first_not_of(' '));
        const std::string value = line.substr(eq + 1);
        try {
          if (key == "seed") m.provenance.seed = std::stoull(value);
          if (key == "tool") m.provenance.tool_version = value;
        } catch (const std::exception&) {
          throw FormatError(where + ": bad provenance value");
        }
      }
      continue;
    }
    if (!header_seen) {
      if (line != kHeader) throw FormatError(where + ": expected header '" + kHeader + "'");
      header_seen = true;
      continue;
    }
    const auto f = split_csv_line(line, where);
    if (f.size() != 6) throw FormatError(where + ": expected 6 fields");
    UttRecord r;
    r.utt_id = f[0];
    r.path = f[1];
    if (r.path.is_relative()) r.path = (base / r.path).lexically_normal();
    try {
      r.label = parse_label(f[2]);
    } catch (const Error& e) {
      throw FormatError(where + ": " + e.what());
    }
    r.domain = f[3];
    r.method = f[4];
    r.subset = parse_subset(f[5]);
    m.records.push_back(std::move(r));
  }
  if (!header_seen) throw FormatError(path.string() + ": missing header");
  m.validate();
  return m;
}

}  // namespace codecwb
