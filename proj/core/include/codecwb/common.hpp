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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace codecwb {

// Error hierarchy. Tools map InvalidArgument/ConfigError to exit code 2 and
// everything else to 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed or corrupt file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Precondition violations on user-supplied values.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Class index convention shared by the detector, corpus and metrics:
// 0 = bonafide (positive class, higher score), 1 = spoof.
enum class Label : std::uint8_t { kBonafide = 0, kSpoof = 1 };

std::string_view to_string(Label label);
Label parse_label(std::string_view text);

// 64-bit finalizer from splitmix64. Used to derive independent seeds.
std::uint64_t mix64(std::uint64_t x);

// FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::span<const std::byte> bytes,
                      std::uint64_t h = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(std::string_view text,
                      std::uint64_t h = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t value);

// Purpose-keyed seed stream:
//   derive_seed(s, p, i) = mix64(mix64(s ^ fnv1a64(p)) + i * 0x9e3779b97f4a7c15)
// so that e.g. the "split" stream is unaffected by how many draws the
// "init" stream makes.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose,
                          std::uint64_t index = 0);

// Seeded generator with platform-stable distributions. std::mt19937_64 is
// fully specified by the standard; the std:: distributions are not, so
// the helpers below are implemented directly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n), rejection sampled.
  std::uint64_t below(std::uint64_t n);
  double normal();
  double rademacher() { return (next() >> 63) != 0 ? 1.0 : -1.0; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }
  template <typename T>
  void shuffle(std::vector<T>& items) {
    shuffle(std::span<T>(items));
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Little-endian float32 blocks used by the codebook and checkpoint files.
void write_f32_le(std::ostream& out, std::span<const float> values);
void read_f32_le(std::istream& in, std::span<float> values);

// Shared plain-text header: "key value..." lines terminated by "end".
struct HeaderLine {
  std::string key;
  std::string value;
};
std::vector<HeaderLine> read_text_header(std::istream& in,
                                         const std::string& source);
std::string header_value(const std::vector<HeaderLine>& header,
                         std::string_view key, const std::string& source);

std::string format_double(double value);  // %.17g, round-trips

}  // namespace codecwb
