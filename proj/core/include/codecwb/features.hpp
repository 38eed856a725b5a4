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

#include <Eigen/Core>
#include <vector>

#include "codecwb/audio.hpp"

namespace codecwb {

// STFT / mel front-end parameters. Defaults are the common 16 kHz speech
// setup: 25 ms Hann window, 10 ms hop, 512-point FFT, 80 bands to Nyquist.
struct MelConfig {
  int n_fft = 512;
  int hop = 160;
  int win_length = 400;
  int n_mels = 80;
  int sample_rate = 16000;
  double f_min = 0.0;
  double f_max = 8000.0;

  int n_bins() const { return n_fft / 2 + 1; }
  void validate() const;
  bool operator==(const MelConfig&) const = default;
};

// Log floor added to mel power before the natural log.
inline constexpr double kLogMelFloor = 1e-10;

struct MelSpectrogram {
  Eigen::MatrixXd values;  // [n_mels x n_frames], ln(power + floor)
  MelConfig config;

  Eigen::Index n_frames() const { return values.cols(); }
};

// Per-band temporal mean followed by per-band population std.
using FeatureVector = Eigen::VectorXd;

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Frame count under center padding: 1 + floor(len / hop).
Eigen::Index stft_frame_count(std::size_t num_samples, const MelConfig& cfg);

// |FFT|^2 of Hann-windowed, reflect-padded frames; [n_fft/2+1 x n_frames].
// Throws InvalidArgument if n_fft is not a power of two.
Eigen::MatrixXd power_stft(const Waveform& w, const MelConfig& cfg);

// Triangular filters on the HTK mel scale; [n_mels x n_fft/2+1].
Eigen::MatrixXd mel_filterbank(const MelConfig& cfg);
std::vector<double> mel_center_frequencies(const MelConfig& cfg);

MelSpectrogram log_mel(const Waveform& w, const MelConfig& cfg);

FeatureVector pool_stats(const MelSpectrogram& m);

// Convenience: resample to cfg.sample_rate, fix duration, log-mel, pool.
FeatureVector extract_features(const Waveform& w, const MelConfig& cfg,
                               double duration_s);

}  // namespace codecwb
