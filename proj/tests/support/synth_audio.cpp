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

#include "synth_audio.hpp"

#include <codecwb/common.hpp>
#include <cmath>
#include <algorithm>
#include <cstdio>
#include <numbers>

namespace codecwb::testing {

namespace {

// Two-pole resonator gain at frequency f for a formant (fc, bandwidth bw).
double formant_gain(double f, double fc, double bw) {
  const double x = (f - fc) / (0.5 * bw);
  return 1.0 / (1.0 + x * x);
}

}  // namespace

Waveform synth_utterance(std::uint64_t seed, int sample_rate, double seconds) {
  Rng rng(seed);
  Waveform w;
  w.sample_rate = sample_rate;
  const auto n = static_cast<std::size_t>(std::lround(seconds * sample_rate));
  w.samples.assign(n, 0.0);
  const double nyquist = 0.5 * sample_rate;

  // Speaker-level voice: base pitch and formant positions.
  const double f0_base = rng.uniform(95.0, 230.0);
  const double formants[3] = {rng.uniform(350.0, 800.0), rng.uniform(900.0, 2200.0),
                              rng.uniform(2300.0, 3300.0)};

  // Alternating voiced and fricative segments separated by pauses.
  std::size_t pos = static_cast<std::size_t>(rng.uniform(0.02, 0.1) * sample_rate);
  double phase = rng.uniform(0.0, 2 * std::numbers::pi);
  while (pos < n) {
    const bool voiced = rng.uniform() < 0.7;
    const auto len = std::min<std::size_t>(
        n - pos, static_cast<std::size_t>(rng.uniform(0.08, 0.3) * sample_rate));
    const double amp = rng.uniform(0.05, 0.2);
    const double glide = rng.uniform(-0.3, 0.3);
    // Fricatives: white noise through a crude high-pass (first difference).
    double prev = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(len);
      const double env = std::sin(std::numbers::pi * t);
      double s = 0.0;
      if (voiced) {
        const double f0 = f0_base * (1.0 + glide * (t - 0.5));
        phase += 2 * std::numbers::pi * f0 / sample_rate;
        for (int h = 1; h * f0 < 0.9 * nyquist && h <= 40; ++h) {
          double g = 0.0;
          for (int k = 0; k < 3; ++k) g += formant_gain(h * f0, formants[k], 80.0 + 60.0 * k);
          s += (g + 0.02) * std::sin(h * phase) / std::sqrt(static_cast<double>(h));
        }
      } else {
        const double white = rng.normal();
        s = 0.6 * (white - prev);
        prev = white;
      }
      w.samples[pos + i] += amp * env * s;
    }
    pos += len + static_cast<std::size_t>(rng.uniform(0.0, 0.15) * sample_rate);
  }

  // Shared recording noise floor.
  const double floor = 0.003 * rng.uniform(0.8, 1.25);
  for (auto& x : w.samples) x += floor * rng.normal();
  return w;
}

std::vector<Waveform> synth_corpus(int n, std::uint64_t seed, int sample_rate, double seconds) {
  std::vector<Waveform> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(synth_utterance(derive_seed(seed, "utterance", static_cast<std::uint64_t>(i)),
                                  sample_rate, seconds));
  }
  return out;
}

void write_corpus(const std::filesystem::path& dir, const std::vector<Waveform>& corpus) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "utt%03zu.wav", i);
    write_wav(dir / name, corpus[i]);
  }
}

}  // namespace codecwb::testing
