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
#include <filesystem>
#include <vector>

namespace codecwb {

// Mono waveform with amplitudes nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 0;

  std::size_t size() const { return samples.size(); }
  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

// Throws InvalidArgument unless samples are non-empty and finite and
// sample_rate > 0.
void validate(const Waveform& w);

struct WavInfo {
  int sample_rate = 0;
  int channels = 0;
  int bits_per_sample = 0;
  bool is_float = false;
  std::size_t frames = 0;
};

// Header-only inspection; applies the same checks as read_wav.
WavInfo probe_wav(const std::filesystem::path& path);

// Accepts 16-bit PCM and 32-bit IEEE float, any channel count (averaged to
// mono). 16-bit samples are scaled by 1/32768.
Waveform read_wav(const std::filesystem::path& path);

// Writes 16-bit PCM mono. Samples are clamped to [-1, 1], scaled by 32768,
// rounded and saturated to [-32768, 32767].
void write_wav(const std::filesystem::path& path, const Waveform& w);

// Kaiser-windowed sinc interpolation (beta 8.6, 64 taps per phase at the
// narrower of the two rates). Output length is round(len * target / source).
Waveform resample(const Waveform& w, int target_sr);

// Truncates (keeping the start) or tiles the waveform to exactly
// round(seconds * sample_rate) samples.
Waveform fix_duration(const Waveform& w, double seconds);

}  // namespace codecwb
