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


#include <gtest/gtest.h>

#include <cmath>
#include <codecwb/audio.hpp>
#include <codecwb/common.hpp>
#include <cstring>
#include <fstream>
#include <numbers>

#include "temp_dir.hpp"

using namespace codecwb;
using codecwb::testing::TempDir;

namespace {

// Builds a canonical RIFF/WAVE file byte by byte.
struct WavBuilder {
  std::string bytes;

  void u16(std::uint16_t v) {
    bytes += static_cast<char>(v & 0xff);
    bytes += static_cast<char>(v >> 8);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes += static_cast<char>((v >> (8 * i)) & 0xff);
  }
  void f32(float f) {
    std::uint32_t w;
    std::memcpy(&w, &f, 4);
    u32(w);
  }

  static std::string make(std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
                          std::uint16_t bits, const std::string& data) {
    WavBuilder b;
    b.bytes = "RIFF";
    b.u32(static_cast<std::uint32_t>(36 + data.size()));
    b.bytes += "WAVEfmt ";
    b.u32(16);
    b.u16(format);
    b.u16(channels);
    b.u32(rate);
    b.u32(rate * channels * bits / 8);
    b.u16(static_cast<std::uint16_t>(channels * bits / 8));
    b.u16(bits);
    b.bytes += "data";
    b.u32(static_cast<std::uint32_t>(data.size()));
    b.bytes += data;
    return b.bytes;
  }
};

void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

Waveform sine(double freq, int sr, std::size_t n, double amp = 0.5) {
  Waveform w;
  w.sample_rate = sr;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    w.samples[i] = amp * std::sin(2 * std::numbers::pi * freq * static_cast<double>(i) / sr);
  }
  return w;
}

}  // namespace

TEST(Wav, Pcm16RoundTripWithinOneLsb) {
  TempDir dir("wav");
  const Waveform w = sine(440.0, 16000, 1600);
  write_wav(dir / "a.wav", w);
  const Waveform r = read_wav(dir / "a.wav");
  ASSERT_EQ(r.sample_rate, 16000);
  ASSERT_EQ(r.size(), w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_NEAR(r.samples[i], w.samples[i], 0.5 / 32768 + 1e-12);
  }
  const WavInfo info = probe_wav(dir / "a.wav");
  EXPECT_EQ(info.channels, 1);
  EXPECT_EQ(info.bits_per_sample, 16);
  EXPECT_EQ(info.frames, 1600u);
}

TEST(Wav, WriteScalesBy32768AndSaturates) {
  TempDir dir("wav");
  Waveform w{{1.0, -1.0, 0.5, 2.0, -3.0}, 8000};
  write_wav(dir / "s.wav", w);
  std::ifstream in(dir / "s.wav", std::ios::binary);
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  ASSERT_EQ(bytes.size(), 44u + 10u);
  auto sample = [&](int i) {
    const auto lo = static_cast<unsigned char>(bytes[44 + 2 * i]);
    const auto hi = static_cast<unsigned char>(bytes[45 + 2 * i]);
    return static_cast<std::int16_t>(lo | (hi << 8));
  };
  EXPECT_EQ(sample(0), 32767);
  EXPECT_EQ(sample(1), -32768);
  EXPECT_EQ(sample(2), 16384);
  EXPECT_EQ(sample(3), 32767);
  EXPECT_EQ(sample(4), -32768);
}

TEST(Wav, ReadsStereoFloatAsMonoAverage) {
  TempDir dir("wav");
  WavBuilder data;
  data.f32(0.5f);
  data.f32(-0.25f);
  data.f32(1.0f);
  data.f32(0.0f);
  write_file(dir / "f.wav", WavBuilder::make(3, 2, 22050, 32, data.bytes));
  const Waveform w = read_wav(dir / "f.wav");
  EXPECT_EQ(w.sample_rate, 22050);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_DOUBLE_EQ(w.samples[0], 0.125);
  EXPECT_DOUBLE_EQ(w.samples[1], 0.5);
}

TEST(Wav, Pcm16ScaledByInverse32768) {
  TempDir dir("wav");
  WavBuilder data;
  data.u16(0x8000);  // -32768
  data.u16(0x4000);  // 16384
  write_file(dir / "p.wav", WavBuilder::make(1, 1, 16000, 16, data.bytes));
  const Waveform w = read_wav(dir / "p.wav");
  EXPECT_DOUBLE_EQ(w.samples[0], -1.0);
  EXPECT_DOUBLE_EQ(w.samples[1], 0.5);
}

TEST(Wav, RejectsMalformedFiles) {
  TempDir dir("wav");
  write_file(dir / "short.wav", "RIFF");
  EXPECT_THROW(read_wav(dir / "short.wav"), FormatError);

  WavBuilder data;
  data.u16(1);
  std::string truncated = WavBuilder::make(1, 1, 16000, 16, data.bytes + data.bytes);
  truncated.resize(truncated.size() - 2);
  write_file(dir / "trunc.wav", truncated);
  EXPECT_THROW(read_wav(dir / "trunc.wav"), FormatError);

  write_file(dir / "pcm8.wav", WavBuilder::make(1, 1, 16000, 8, "ab"));
  EXPECT_THROW(read_wav(dir / "pcm8.wav"), FormatError);

  write_file(dir / "empty.wav", WavBuilder::make(1, 1, 16000, 16, ""));
  EXPECT_THROW(probe_wav(dir / "empty.wav"), FormatError);

  EXPECT_THROW(read_wav(dir / "missing.wav"), IoError);
}

TEST(Resample, SameRateIsIdentity) {
  const Waveform w = sine(300.0, 16000, 1000);
  const Waveform r = resample(w, 16000);
  EXPECT_EQ(r.samples, w.samples);
}

TEST(Resample, LengthIsRoundedRatio) {
  const Waveform w = sine(300.0, 44100, 44101);
  EXPECT_EQ(resample(w, 16000).size(),
            static_cast<std::size_t>(std::lround(44101.0 * 16000 / 44100)));
  EXPECT_EQ(resample(w, 48000).sample_rate, 48000);
}

TEST(Resample, InBandSineMatchesAnalyticSignal) {
  // A 1 kHz tone resampled 16 kHz -> 24 kHz must equal the same tone
  // sampled at 24 kHz, away from the edges.
  const Waveform w = sine(1000.0, 16000, 16000);
  const Waveform r = resample(w, 24000);
  const Waveform ref = sine(1000.0, 24000, r.size());
  double max_err = 0.0;
  for (std::size_t i = 500; i + 500 < r.size(); ++i) {
    max_err = std::max(max_err, std::abs(r.samples[i] - ref.samples[i]));
  }
  EXPECT_LT(max_err, 1e-3);
}

TEST(Resample, DownsamplingRemovesAboveNyquist) {
  // 7 kHz cannot survive 16 kHz -> 8 kHz (new Nyquist 4 kHz).
  const Waveform w = sine(7000.0, 16000, 16000);
  const Waveform r = resample(w, 8000);
  double energy = 0.0;
  for (std::size_t i = 200; i + 200 < r.size(); ++i) energy += r.samples[i] * r.samples[i];
  EXPECT_LT(energy / static_cast<double>(r.size()), 1e-4 * 0.125);
}

TEST(FixDuration, TruncatesAndTiles) {
  Waveform w{{1, 2, 3, 4, 5}, 2};
  const Waveform shorter = fix_duration(w, 1.0);
  EXPECT_EQ(shorter.samples, (std::vector<double>{1, 2}));
  const Waveform longer = fix_duration(w, 6.0);
  EXPECT_EQ(longer.samples, (std::vector<double>{1, 2, 3, 4, 5, 1, 2, 3, 4, 5, 1, 2}));
  EXPECT_THROW(fix_duration(w, 0.0), InvalidArgument);
}

TEST(Validate, RejectsBadWaveforms) {
  EXPECT_THROW(validate(Waveform{{}, 16000}), InvalidArgument);
  EXPECT_THROW(validate(Waveform{{0.1}, 0}), InvalidArgument);
  EXPECT_THROW(validate(Waveform{{std::nan("")}, 16000}), InvalidArgument);
  EXPECT_NO_THROW(validate(Waveform{{0.1}, 16000}));
}
