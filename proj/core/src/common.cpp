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

#include "codecwb/common.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

namespace codecwb {

std::string_view to_string(Label label) {
  return label == Label::kBonafide ? "bonafide" : "spoof";
}

Label parse_label(std::string_view text) {
  if (text == "bonafide") return Label::kBonafide;
  if (text == "spoof") return Label::kSpoof;
  throw FormatError("unknown label '" + std::string(text) + "'");
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::span<const std::byte> bytes, std::uint64_t h) {
  for (std::byte b : bytes) {
    h ^= static_cast<std::uint64_t>(b);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view text, std::uint64_t h) {
  return fnv1a64(std::as_bytes(std::span(text.data(), text.size())), h);
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose,
                          std::uint64_t index) {
  return mix64(mix64(seed ^ fnv1a64(purpose)) +
               index * 0x9e3779b97f4a7c15ULL);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("Rng::below(0)");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = next();
  } while (r >= limit);
  return r % n;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Marsaglia polar method.
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

void write_f32_le(std::ostream& out, std::span<const float> values) {
  std::vector<std::uint32_t> words(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t w = std::bit_cast<std::uint32_t>(values[i]);
    if constexpr (std::endian::native == std::endian::big) {
      w = ((w & 0xffu) << 24) | ((w & 0xff00u) << 8) | ((w >> 8) & 0xff00u) |
          (w >> 24);
    }
    words[i] = w;
  }
  out.write(reinterpret_cast<const char*>(words.data()),
            static_cast<std::streamsize>(words.size() * 4));
}

void read_f32_le(std::istream& in, std::span<float> values) {
  std::vector<std::uint32_t> words(values.size());
  in.read(reinterpret_cast<char*>(words.data()),
          static_cast<std::streamsize>(words.size() * 4));
  if (static_cast<std::size_t>(in.gcount()) != words.size() * 4) {
    throw FormatError("truncated float block");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t w = words[i];
    if constexpr (std::endian::native == std::endian::big) {
      w = ((w & 0xffu) << 24) | ((w & 0xff00u) << 8) | ((w >> 8) & 0xff00u) |
          (w >> 24);
    }
    values[i] = std::bit_cast<float>(w);
  }
}

std::vector<HeaderLine> read_text_header(std::istream& in,
                                         const std::string& source) {
  std::vector<HeaderLine> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (line == "end") return lines;
    const auto space = line.find(' ');
    if (space == std::string::npos) {
      lines.push_back({line, ""});
    } else {
      lines.push_back({line.substr(0, space), line.substr(space + 1)});
    }
    if (lines.size() > 4096) break;
  }
  throw FormatError(source + ": unterminated header");
}

std::string header_value(const std::vector<HeaderLine>& header,
                         std::string_view key, const std::string& source) {
  for (const auto& h : header) {
    if (h.key == key) return h.value;
  }
  throw FormatError(source + ": header field '" + std::string(key) +
                    "' missing");
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace codecwb
