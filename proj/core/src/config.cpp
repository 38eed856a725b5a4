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

#include "codecwb/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace codecwb {
namespace {

class Cursor {
 public:
  Cursor(std::string_view text, std::string source, int line)
      : text_(text), source_(std::move(source)), line_(line) {}

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }
  char get() { return text_[pos_++]; }
  std::size_t pos() const { return pos_; }

  void skip_space() {
    while (!done()) {
      const char c = peek();
      if (c == '#') {
        while (!done() && peek() != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        if (c == '\n') ++line_;
        ++pos_;
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(line_) + ": " + what);
  }

  TomlValue value() {
    skip_space();
    TomlValue v;
    v.line = line_;
    if (done()) fail("missing value");
    const char c = peek();
    if (c == '"' || c == '\'') {
      v.kind = TomlValue::Kind::kString;
      v.str = string(get());
      return v;
    }
    if (c == '[') {
      get();
      v.kind = TomlValue::Kind::kArray;
      skip_space();
      while (peek() != ']') {
        v.array.push_back(value());
        skip_space();
        if (peek() == ',') {
          get();
          skip_space();
        } else if (peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
      get();
      return v;
    }
    std::size_t start = pos_;
    while (!done()) {
      const char d = peek();
      if (d == ',' || d == ']' || d == '#' || std::isspace(static_cast<unsigned char>(d))) break;
      ++pos_;
    }
    const std::string_view word = text_.substr(start, pos_ - start);
    if (word == "true" || word == "false") {
      v.kind = TomlValue::Kind::kBool;
      v.boolean = word == "true";
      return v;
    }
    std::string digits;
    for (char d : word) {
      if (d != '_') digits += d;
    }
    const bool looks_float = digits.find_first_of(".eE") != std::string::npos ||
                             digits == "inf" || digits == "nan";
    if (!looks_float) {
      std::int64_t n = 0;
      const char* b = digits.data();
      if (!digits.empty() && digits[0] == '+') ++b;
      auto [p, ec] = std::from_chars(b, digits.data() + digits.size(), n);
      if (ec == std::errc() && p == digits.data() + digits.size() && !digits.empty()) {
        v.kind = TomlValue::Kind::kInteger;
        v.integer = n;
        v.number = static_cast<double>(n);
        return v;
      }
    } else {
      try {
        std::size_t used = 0;
        v.number = std::stod(digits, &used);
        if (used == digits.size()) {
          v.kind = TomlValue::Kind::kFloat;
          return v;
        }
      } catch (const std::exception&) {
      }
    }
    fail("cannot parse value '" + std::string(word) + "'");
  }

 private:
  std::string string(char quote) {
    std::string out;
    while (true) {
      if (done() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == quote) return out;
      if (c == '\\' && quote == '"') {
        if (done()) fail("unterminated escape");
        const char e = get();
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      } else {
        out += c;
      }
    }
  }

  std::string_view text_;
  std::string source_;
  int line_;
  std::size_t pos_ = 0;
};

bool bare_key(std::string_view k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Reads typed values out of one section and reports unknown keys.
class SectionReader {
 public:
  SectionReader(const TomlDocument& doc, std::string name, std::string source)
      : name_(std::move(name)), source_(std::move(source)) {
    auto it = doc.sections.find(name_);
    if (it != doc.sections.end()) table_ = &it->second;
  }

  const TomlValue* get(std::string_view key) {
    used_.emplace(key);
    return table_ ? table_->find(key) : nullptr;
  }

  void number(std::string_view key, double& out) {
    if (auto v = get(key)) {
      if (v->kind != TomlValue::Kind::kInteger && v->kind != TomlValue::Kind::kFloat) {
        fail(*v, key, "a number");
      }
      out = v->number;
    }
  }
  void integer(std::string_view key, int& out) {
    if (auto v = get(key)) {
      if (v->kind != TomlValue::Kind::kInteger) fail(*v, key, "an integer");
      out = static_cast<int>(v->integer);
    }
  }
  void u64(std::string_view key, std::uint64_t& out) {
    if (auto v = get(key)) {
      if (v->kind != TomlValue::Kind::kInteger || v->integer < 0) {
        fail(*v, key, "a non-negative integer");
      }
      out = static_cast<std::uint64_t>(v->integer);
    }
  }
  void string(std::string_view key, std::string& out) {
    if (auto v = get(key)) {
      if (v->kind != TomlValue::Kind::kString) fail(*v, key, "a string");
      out = v->str;
    }
  }
  void strings(std::string_view key, std::vector<std::string>& out) {
    if (auto v = get(key)) {
      if (v->kind != TomlValue::Kind::kArray) fail(*v, key, "an array of strings");
      out.clear();
      for (const auto& e : v->array) {
        if (e.kind != TomlValue::Kind::kString) fail(e, key, "an array of strings");
        out.push_back(e.str);
      }
    }
  }
  void integers(std::string_view key, std::vector<int>& out) {
    if (auto v = get(key)) {
      if (v->kind != TomlValue::Kind::kArray) fail(*v, key, "an array of integers");
      out.clear();
      for (const auto& e : v->array) {
        if (e.kind != TomlValue::Kind::kInteger) fail(e, key, "an array of integers");
        out.push_back(static_cast<int>(e.integer));
      }
    }
  }

  // Every key must have been consumed.
  void finish() const {
    if (!table_) return;
    for (const auto& [key, value] : table_->entries) {
      if (!used_.contains(key)) {
        throw ConfigError(source_ + ":" + std::to_string(value.line) + ": unknown key '" +
                          key + "' in " + (name_.empty() ? "top level" : "[" + name_ + "]"));
      }
    }
  }

  const TomlTable* table() const { return table_; }

  [[noreturn]] void fail(const TomlValue& v, std::string_view key, const char* want) const {
    throw ConfigError(source_ + ":" + std::to_string(v.line) + ": " +
                      (name_.empty() ? "" : name_ + ".") + std::string(key) + " must be " +
                      want + ", got " + v.describe());
  }

 private:
  std::string name_;
  std::string source_;
  const TomlTable* table_ = nullptr;
  std::set<std::string, std::less<>> used_;
};

}  // namespace

std::string TomlValue::describe() const {
  switch (kind) {
    case Kind::kString: return "string \"" + str + "\"";
    case Kind::kInteger: return "integer " + std::to_string(integer);
    case Kind::kFloat: return "float " + format_double(number);
    case Kind::kBool: return boolean ? "true" : "false";
    case Kind::kArray: return "array of " + std::to_string(array.size());
  }
  return "?";
}

const TomlValue* TomlTable::find(std::string_view key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

void TomlTable::set(const std::string& key, TomlValue value) {
  for (auto& [k, v] : entries) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries.emplace_back(key, std::move(value));
}

TomlDocument parse_toml(std::string_view text, const std::string& source) {
  TomlDocument doc;
  doc.sections[""];
  std::string section;
  std::size_t pos = 0;
  int line = 1;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    const std::string stripped = trim(raw);
    if (stripped.empty() || stripped[0] == '#') {
      pos = end + 1;
      ++line;
      continue;
    }
    if (stripped[0] == '[') {
      const auto close = stripped.find(']');
      std::string rest = close == std::string::npos ? "" : trim(stripped.substr(close + 1));
      if (close == std::string::npos || (!rest.empty() && rest[0] != '#')) {
        throw ConfigError(source + ":" + std::to_string(line) + ": malformed section header");
      }
      section = trim(stripped.substr(1, close - 1));
      if (!bare_key(section)) {
        throw ConfigError(source + ":" + std::to_string(line) + ": bad section name '" +
                          section + "'");
      }
      doc.sections[section];
      pos = end + 1;
      ++line;
      continue;
    }
    const auto eq = raw.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(source + ":" + std::to_string(line) + ": expected key = value");
    }
    std::string key = trim(raw.substr(0, eq));
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"') {
      key = key.substr(1, key.size() - 2);
    } else if (!bare_key(key) || key.find('.') != std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line) + ": bad key '" + key + "'");
    }
    Cursor cur(text.substr(pos + eq + 1), source, line);
    TomlValue v = cur.value();
    // Rest of the line must be blank or a comment.
    const std::size_t consumed = pos + eq + 1 + cur.pos();
    std::size_t line_end = text.find('\n', consumed);
    if (line_end == std::string_view::npos) line_end = text.size();
    const std::string tail = trim(text.substr(consumed, line_end - consumed));
    if (!tail.empty() && tail[0] != '#') {
      throw ConfigError(source + ":" + std::to_string(line) + ": trailing text after value");
    }
    auto& table = doc.sections[section];
    if (table.find(key)) {
      throw ConfigError(source + ":" + std::to_string(line) + ": duplicate key '" + key + "'");
    }
    table.set(key, std::move(v));
    line += static_cast<int>(std::count(text.begin() + static_cast<std::ptrdiff_t>(pos),
                                        text.begin() + static_cast<std::ptrdiff_t>(line_end),
                                        '\n')) + 1;
    pos = line_end + 1;
  }
  return doc;
}

TomlValue parse_toml_value(std::string_view text, const std::string& source) {
  Cursor cur(text, source, 1);
  TomlValue v = cur.value();
  cur.skip_space();
  if (!cur.done()) throw ConfigError(source + ": trailing text after value");
  return v;
}

void apply_override(TomlDocument& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  }
  const std::string path = trim(assignment.substr(0, eq));
  const std::string text = trim(assignment.substr(eq + 1));
  const auto dot = path.rfind('.');
  const std::string section = dot == std::string::npos ? "" : path.substr(0, dot);
  const std::string key = dot == std::string::npos ? path : path.substr(dot + 1);
  if (key.empty() || !bare_key(path)) {
    throw ConfigError("override '" + std::string(assignment) + "': bad key");
  }
  TomlValue v;
  try {
    v = parse_toml_value(text, "--set " + path);
  } catch (const ConfigError&) {
    v = TomlValue{};
    v.kind = TomlValue::Kind::kString;
    v.str = text;
  }
  doc.sections[section].set(key, std::move(v));
}

const CodecPreset& ExperimentConfig::preset(std::string_view name) const {
  for (const auto& p : presets) {
    if (p.name == name) return p;
  }
  throw ConfigError("preset '" + std::string(name) + "' is not configured");
}

std::string ExperimentConfig::condition_method(const std::string& condition) const {
  auto it = conditions.find(condition);
  return it == conditions.end() ? condition : it->second;
}

std::vector<std::string> ExperimentConfig::codec_conditions(
    std::span<const std::string> listed) const {
  std::vector<std::string> out;
  for (const auto& c : listed) {
    const auto method = condition_method(c);
    if (std::any_of(presets.begin(), presets.end(),
                    [&](const CodecPreset& p) { return p.name == method; })) {
      out.push_back(c);
    }
  }
  return out;
}

ExperimentConfig config_from_toml(const TomlDocument& doc,
                                  const std::filesystem::path& base_dir) {
  const std::string src = "config";
  ExperimentConfig cfg;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() ? (base_dir / path).lexically_normal() : path;
  };

  static const std::set<std::string, std::less<>> kSections{
      "", "paths", "corpus", "audio", "mel", "codec", "train", "domains", "conditions", "eval"};
  for (const auto& [name, table] : doc.sections) {
    if (!kSections.contains(name) && !name.starts_with("preset.")) {
      throw ConfigError(src + ": unknown section [" + name + "]");
    }
  }

  SectionReader root(doc, "", src);
  if (!root.get("seed")) throw ConfigError("config: 'seed' is required");
  root.u64("seed", cfg.seed);
  root.integer("workers", cfg.workers);
  root.finish();

  SectionReader paths(doc, "paths", src);
  std::string corpus, work;
  std::vector<std::string> external;
  paths.string("corpus_dir", corpus);
  paths.string("work_dir", work);
  paths.strings("external_manifests", external);
  paths.finish();
  if (!corpus.empty()) cfg.corpus_dir = resolve(corpus);
  cfg.work_dir = resolve(work.empty() ? "work" : work);
  for (const auto& e : external) cfg.external_manifests.push_back(resolve(e));

  SectionReader corpus_sec(doc, "corpus", src);
  corpus_sec.string("domain", cfg.corpus_domain);
  corpus_sec.finish();

  SectionReader audio(doc, "audio", src);
  audio.number("duration_s", cfg.duration_s);
  audio.finish();
  if (!(cfg.duration_s > 0.0)) throw ConfigError("audio.duration_s must be > 0");

  SectionReader mel(doc, "mel", src);
  mel.integer("n_fft", cfg.mel.n_fft);
  mel.integer("hop", cfg.mel.hop);
  mel.integer("win_length", cfg.mel.win_length);
  mel.integer("n_mels", cfg.mel.n_mels);
  mel.integer("sample_rate", cfg.mel.sample_rate);
  mel.number("f_min", cfg.mel.f_min);
  mel.number("f_max", cfg.mel.f_max);
  mel.finish();
  try {
    cfg.mel.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("[mel]: ") + e.what());
  }

  // Custom or redefined presets.
  std::map<std::string, CodecPreset> custom;
  for (const auto& [name, table] : doc.sections) {
    if (!name.starts_with("preset.")) continue;
    const std::string pname = name.substr(7);
    SectionReader r(doc, name, src);
    int sr = 16000, hop = 0, nq = 8, bits = 0;
    double bps = 4000.0;
    r.integer("sample_rate", sr);
    r.integer("hop", hop);
    r.integer("num_quantizers", nq);
    r.number("target_bps", bps);
    r.integer("codebook_bits", bits);
    r.finish();
    try {
      if (sr <= 0) throw InvalidArgument("sample_rate must be > 0");
      CodecPreset p = make_preset(pname, sr, hop > 0 ? hop : default_hop(sr), nq, bps);
      if (bits > 0) {
        p.codebook_bits = bits;
        p.validate();
      }
      custom[pname] = p;
    } catch (const InvalidArgument& e) {
      throw ConfigError("[" + name + "]: " + e.what());
    }
  }

  SectionReader codec(doc, "codec", src);
  std::vector<std::string> preset_names, holdout;
  codec.strings("presets", preset_names);
  codec.strings("holdout", holdout);
  codec.integer("iterations", cfg.codebook_options.iterations);
  int max_frames = 0;
  codec.integer("max_train_frames", max_frames);
  codec.finish();
  if (max_frames < 0) throw ConfigError("codec.max_train_frames must be >= 0");
  cfg.codebook_options.max_frames = static_cast<std::size_t>(max_frames);
  if (cfg.codebook_options.iterations < 1) throw ConfigError("codec.iterations must be >= 1");
  for (const auto& n : preset_names) {
    if (auto it = custom.find(n); it != custom.end()) {
      cfg.presets.push_back(it->second);
    } else if (auto p = find_builtin_preset(n)) {
      cfg.presets.push_back(*p);
    } else {
      throw ConfigError("codec.presets: unknown preset '" + n + "'");
    }
  }
  for (const auto& h : holdout) {
    if (std::none_of(preset_names.begin(), preset_names.end(),
                     [&](const std::string& n) { return n == h; })) {
      throw ConfigError("codec.holdout: '" + h + "' is not in codec.presets");
    }
    cfg.holdout.insert(h);
  }

  SectionReader train(doc, "train", src);
  std::string strategy = "erm", selection = "dev_loss";
  train.string("strategy", strategy);
  train.number("rho", cfg.train.sam.rho);
  train.number("asam_eta", cfg.train.sam.asam_eta);
  train.number("base_lr", cfg.train.base_lr);
  train.integer("epochs", cfg.train.epochs);
  train.integer("halve_every", cfg.train.halve_every);
  train.integer("batch_size", cfg.train.batch_size);
  train.number("weight_bonafide", cfg.train.class_weights.bonafide);
  train.number("weight_spoof", cfg.train.class_weights.spoof);
  train.string("selection_metric", selection);
  train.integers("arch", cfg.train.arch);
  train.finish();
  try {
    cfg.train.sam.variant = parse_strategy(strategy);
    cfg.train.selection_metric = parse_selection_metric(selection);
    cfg.train.seed = cfg.seed;
    cfg.train.validate();
    if (cfg.train.arch.front() != 2 * cfg.mel.n_mels) {
      throw InvalidArgument("train.arch input must be 2 * mel.n_mels = " +
                            std::to_string(2 * cfg.mel.n_mels));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("[train]: ") + e.what());
  }

  SectionReader domains(doc, "domains", src);
  if (domains.table()) {
    for (const auto& [tag, value] : domains.table()->entries) {
      if (value.kind != TomlValue::Kind::kString ||
          (value.str != "codec" && value.str != "external")) {
        domains.fail(value, tag, "\"codec\" or \"external\"");
      }
      cfg.domains[tag] = value.str;
      domains.get(tag);
    }
  }
  if (cfg.domains.empty()) cfg.domains[cfg.corpus_domain] = "codec";

  SectionReader conds(doc, "conditions", src);
  if (conds.table()) {
    for (const auto& [alias, value] : conds.table()->entries) {
      if (value.kind != TomlValue::Kind::kString) conds.fail(value, alias, "a method name");
      cfg.conditions[alias] = value.str;
    }
  }

  SectionReader eval(doc, "eval", src);
  eval.strings("conditions", cfg.eval_conditions);
  eval.finish();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  TomlDocument doc = parse_toml(text.str(), path.string());
  for (const auto& o : overrides) apply_override(doc, o);
  ExperimentConfig cfg =
      config_from_toml(doc, std::filesystem::absolute(path).parent_path());
  cfg.source = path;
  return cfg;
}

}  // namespace codecwb
