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

#include "codecwb/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <string>

#include "codecwb/common.hpp"

namespace codecwb {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
std::uint32_t le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

struct ParsedWav {
  WavInfo info;
  std::size_t data_offset = 0;
  std::size_t data_bytes = 0;
};

std::vector<std::uint8_t> slurp(const std::filesystem::path& path,
                                std::size_t max_bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open file");
  std::vector<std::uint8_t> bytes;
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  bytes.resize(std::min(size, max_bytes));
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
    throw IoError(path.string() + ": read failed");
  }
  return bytes;
}

// Walks the RIFF chunk list. `file_size` is the true file length; `bytes`
// may be a prefix of it when only the header is needed.
ParsedWav parse_header(const std::vector<std::uint8_t>& bytes,
                       std::size_t file_size, const std::string& name) {
  auto malformed = [&](const std::string& why) {
    return FormatError(name + ": malformed WAV header (" + why + ")");
  };
  if (file_size < 12 || bytes.size() < 12) throw malformed("too short");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw malformed("missing RIFF/WAVE tag");
  }
  ParsedWav out;
  bool have_fmt = false;
  std::uint16_t format = 0;
  std::size_t pos = 12;
  while (pos + 8 <= file_size) {
    if (pos + 8 > bytes.size()) throw malformed("chunk header beyond buffer");
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t chunk_size = le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_size < 16 || body + chunk_size > bytes.size()) {
        throw malformed("bad fmt chunk");
      }
      const std::uint8_t* f = bytes.data() + body;
      format = le16(f);
      out.info.channels = le16(f + 2);
      out.info.sample_rate = static_cast<int>(le32(f + 4));
      out.info.bits_per_sample = le16(f + 14);
      if (format == kFormatExtensible) {
        if (chunk_size < 26) throw malformed("short extensible fmt chunk");
        format = le16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw malformed("data chunk before fmt chunk");
      if (body + chunk_size > file_size) throw malformed("truncated data chunk");
      out.data_offset = body;
      out.data_bytes = chunk_size;
      break;
    }
    pos = body + chunk_size + (chunk_size & 1u);
  }
  if (!have_fmt) throw malformed("no fmt chunk");
  if (out.data_offset == 0) throw malformed("no data chunk");
  if (out.info.channels < 1) throw malformed("zero channels");
  if (out.info.sample_rate <= 0) throw malformed("non-positive sample rate");

  if (format == kFormatPcm && out.info.bits_per_sample == 16) {
    out.info.is_float = false;
  } else if (format == kFormatFloat && out.info.bits_per_sample == 32) {
    out.info.is_float = true;
  } else {
    throw FormatError(name + ": unsupported WAV encoding (format " +
                      std::to_string(format) + ", " +
                      std::to_string(out.info.bits_per_sample) + " bits)");
  }
  const std::size_t frame_bytes =
      static_cast<std::size_t>(out.info.channels) *
      static_cast<std::size_t>(out.info.bits_per_sample / 8);
  out.info.frames = out.data_bytes / frame_bytes;
  if (out.info.frames == 0) throw FormatError(name + ": WAV has no samples");
  return out;
}

double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

constexpr double kKaiserBeta = 8.6;
constexpr int kHalfTaps = 32;

}  // namespace

void validate(const Waveform& w) {
  if (w.sample_rate <= 0) throw InvalidArgument("waveform sample_rate <= 0");
  if (w.samples.empty()) throw InvalidArgument("waveform is empty");
  for (double s : w.samples) {
    if (!std::isfinite(s)) throw InvalidArgument("waveform has non-finite sample");
  }
}

WavInfo probe_wav(const std::filesystem::path& path) {
  std::error_code ec;
  const auto file_size = std::filesystem::file_size(path, ec);
  if (ec) throw IoError(path.string() + ": cannot open file");
  const auto bytes = slurp(path, 1 << 16);
  return parse_header(bytes, file_size, path.string()).info;
}

Waveform read_wav(const std::filesystem::path& path) {
  const auto bytes = slurp(path, SIZE_MAX);
  const ParsedWav wav = parse_header(bytes, bytes.size(), path.string());
  const int channels = wav.info.channels;
  const std::uint8_t* data = bytes.data() + wav.data_offset;

  Waveform w;
  w.sample_rate = wav.info.sample_rate;
  w.samples.resize(wav.info.frames);
  for (std::size_t i = 0; i < wav.info.frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      const std::size_t idx = i * static_cast<std::size_t>(channels) +
                              static_cast<std::size_t>(c);
      if (wav.info.is_float) {
        float f;
        const std::uint32_t bits = le32(data + idx * 4);
        std::memcpy(&f, &bits, 4);
        if (!std::isfinite(f)) {
          throw FormatError(path.string() + ": non-finite float sample");
        }
        acc += f;
      } else {
        acc += static_cast<std::int16_t>(le16(data + idx * 2)) / 32768.0;
      }
    }
    w.samples[i] = acc / channels;
  }
  return w;
}

void write_wav(const std::filesystem::path& path, const Waveform& w) {
  validate(w);
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(w.size() * 2);
  std::vector<std::uint8_t> out(44 + data_bytes);
  auto put16 = [&](std::size_t at, std::uint16_t v) {
    out[at] = static_cast<std::uint8_t>(v & 0xff);
    out[at + 1] = static_cast<std::uint8_t>(v >> 8);
  };
  auto put32 = [&](std::size_t at, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) {
      out[at + b] = static_cast<std::uint8_t>((v >> (8 * b)) & 0xff);
    }
  };
  std::memcpy(out.data(), "RIFF", 4);
  put32(4, 36 + data_bytes);
  std::memcpy(out.data() + 8, "WAVEfmt ", 8);
  put32(16, 16);
  put16(20, kFormatPcm);
  put16(22, 1);
  put32(24, static_cast<std::uint32_t>(w.sample_rate));
  put32(28, static_cast<std::uint32_t>(w.sample_rate) * 2);
  put16(32, 2);
  put16(34, 16);
  std::memcpy(out.data() + 36, "data", 4);
  put32(40, data_bytes);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double x = std::clamp(w.samples[i], -1.0, 1.0);
    const double q = std::clamp(std::round(x * 32768.0), -32768.0, 32767.0);
    put16(44 + 2 * i,
          static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError(path.string() + ": cannot open for writing");
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError(path.string() + ": write failed");
}

Waveform resample(const Waveform& w, int target_sr) {
  if (target_sr <= 0) throw InvalidArgument("resample: target_sr must be > 0");
  validate(w);
  if (target_sr == w.sample_rate) return w;

  const std::int64_t in_sr = w.sample_rate;
  const std::int64_t out_sr = target_sr;
  const std::int64_t g = std::gcd(in_sr, out_sr);
  const std::int64_t up = out_sr / g;
  const std::int64_t down = in_sr / g;
  const auto len = static_cast<std::int64_t>(w.size());
  const std::int64_t out_len = (2 * len * out_sr + in_sr) / (2 * in_sr);

  // Cutoff at the lower Nyquist, expressed relative to the input rate. The
  // kernel is stretched by 1/scale when decimating so the transition band
  // stays proportionate.
  const double scale = std::min(1.0, static_cast<double>(out_sr) / in_sr);
  const double half_width = kHalfTaps / scale;
  const auto reach = static_cast<std::int64_t>(std::ceil(half_width));
  const std::int64_t taps = 2 * reach;
  const double i0_beta = bessel_i0(kKaiserBeta);

  auto kernel_row = [&](std::int64_t phase, std::vector<double>& row) {
    const double frac = static_cast<double>(phase) / static_cast<double>(up);
    row.assign(static_cast<std::size_t>(taps), 0.0);
    double sum = 0.0;
    for (std::int64_t j = 0; j < taps; ++j) {
      const double t = static_cast<double>(j - reach + 1) - frac;
      if (std::abs(t) >= half_width) continue;
      const double x = scale * t;
      const double sinc =
          x == 0.0 ? 1.0
                   : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
      const double r = t / half_width;
      const double win = bessel_i0(kKaiserBeta * std::sqrt(1.0 - r * r)) / i0_beta;
      row[static_cast<std::size_t>(j)] = scale * sinc * win;
      sum += row[static_cast<std::size_t>(j)];
    }
    for (double& h : row) h /= sum;
  };

  constexpr std::int64_t kMaxTablePhases = 8192;
  std::vector<std::vector<double>> table;
  if (up <= kMaxTablePhases) {
    table.resize(static_cast<std::size_t>(up));
    for (std::int64_t p = 0; p < up; ++p) {
      kernel_row(p, table[static_cast<std::size_t>(p)]);
    }
  }

  Waveform out;
  out.sample_rate = target_sr;
  out.samples.resize(static_cast<std::size_t>(out_len));
  std::vector<double> scratch;
  for (std::int64_t n = 0; n < out_len; ++n) {
    const std::int64_t num = n * down;
    const std::int64_t base = num / up;
    const std::int64_t phase = num % up;
    const std::vector<double>* row;
    if (!table.empty()) {
      row = &table[static_cast<std::size_t>(phase)];
    } else {
      kernel_row(phase, scratch);
      row = &scratch;
    }
    double acc = 0.0;
    const std::int64_t first = base - reach + 1;
    const std::int64_t lo = std::max<std::int64_t>(0, -first);
    const std::int64_t hi = std::min<std::int64_t>(taps, len - first);
    for (std::int64_t j = lo; j < hi; ++j) {
      acc += (*row)[static_cast<std::size_t>(j)] *
             w.samples[static_cast<std::size_t>(first + j)];
    }
    out.samples[static_cast<std::size_t>(n)] = acc;
  }
  return out;
}

Waveform fix_duration(const Waveform& w, double seconds) {
  if (!(seconds > 0.0)) throw InvalidArgument("fix_duration: seconds must be > 0");
  if (w.samples.empty()) throw InvalidArgument("fix_duration: empty waveform");
  const auto target =
      static_cast<std::size_t>(std::llround(seconds * w.sample_rate));
  if (target == 0) throw InvalidArgument("fix_duration: target length is zero");
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.resize(target);
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < target; ++i) out.samples[i] = w.samples[i % n];
  return out;
}

}  // namespace codecwb
