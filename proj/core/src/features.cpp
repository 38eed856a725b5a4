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

#include "codecwb/features.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <unsupported/Eigen/FFT>

#include "codecwb/common.hpp"

namespace codecwb {
namespace {

// Reflection about the signal edges without repeating the edge sample,
// folded repeatedly for signals shorter than the padding.
std::size_t reflect_index(std::int64_t i, std::int64_t n) {
  if (n == 1) return 0;
  const std::int64_t period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  if (i >= n) i = period - i;
  return static_cast<std::size_t>(i);
}

}  // namespace

void MelConfig::validate() const {
  if (n_fft <= 0 || win_length <= 0 || win_length > n_fft) {
    throw InvalidArgument("MelConfig: need 0 < win_length <= n_fft");
  }
  if (hop <= 0) throw InvalidArgument("MelConfig: hop must be > 0");
  if (n_mels < 1) throw InvalidArgument("MelConfig: n_mels must be >= 1");
  if (sample_rate <= 0) throw InvalidArgument("MelConfig: sample_rate must be > 0");
  if (!(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate / 2.0)) {
    throw InvalidArgument("MelConfig: need 0 <= f_min < f_max <= sample_rate/2");
  }
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

Eigen::Index stft_frame_count(std::size_t num_samples, const MelConfig& cfg) {
  return 1 + static_cast<Eigen::Index>(num_samples /
                                       static_cast<std::size_t>(cfg.hop));
}

Eigen::MatrixXd power_stft(const Waveform& w, const MelConfig& cfg) {
  if (cfg.n_fft <= 0 || !std::has_single_bit(static_cast<unsigned>(cfg.n_fft))) {
    throw InvalidArgument("power_stft: n_fft must be a power of two, got " +
                          std::to_string(cfg.n_fft));
  }
  if (cfg.hop <= 0 || cfg.win_length <= 0 || cfg.win_length > cfg.n_fft) {
    throw InvalidArgument("power_stft: invalid hop/win_length");
  }
  if (w.samples.empty()) throw InvalidArgument("power_stft: empty waveform");

  const int n_fft = cfg.n_fft;
  const auto len = static_cast<std::int64_t>(w.size());
  const Eigen::Index frames = stft_frame_count(w.size(), cfg);

  // Periodic Hann of win_length, centred inside n_fft.
  std::vector<double> window(static_cast<std::size_t>(n_fft), 0.0);
  const int offset = (n_fft - cfg.win_length) / 2;
  for (int n = 0; n < cfg.win_length; ++n) {
    window[static_cast<std::size_t>(offset + n)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / cfg.win_length);
  }

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> buf(static_cast<std::size_t>(n_fft));
  std::vector<std::complex<double>> spec;
  Eigen::MatrixXd power(cfg.n_bins(), frames);
  const std::int64_t pad = n_fft / 2;
  for (Eigen::Index f = 0; f < frames; ++f) {
    const std::int64_t start = f * cfg.hop - pad;
    for (int n = 0; n < n_fft; ++n) {
      buf[static_cast<std::size_t>(n)] =
          w.samples[reflect_index(start + n, len)] *
          window[static_cast<std::size_t>(n)];
    }
    fft.fwd(spec, buf);
    for (int k = 0; k < cfg.n_bins(); ++k) {
      power(k, f) = std::norm(spec[static_cast<std::size_t>(k)]);
    }
  }
  return power;
}

std::vector<double> mel_center_frequencies(const MelConfig& cfg) {
  cfg.validate();
  const double lo = hz_to_mel(cfg.f_min);
  const double hi = hz_to_mel(cfg.f_max);
  std::vector<double> centers(static_cast<std::size_t>(cfg.n_mels));
  for (int m = 0; m < cfg.n_mels; ++m) {
    centers[static_cast<std::size_t>(m)] =
        mel_to_hz(lo + (hi - lo) * (m + 1) / (cfg.n_mels + 1));
  }
  return centers;
}

Eigen::MatrixXd mel_filterbank(const MelConfig& cfg) {
  cfg.validate();
  const int bins = cfg.n_bins();
  const double lo = hz_to_mel(cfg.f_min);
  const double hi = hz_to_mel(cfg.f_max);
  std::vector<double> edges(static_cast<std::size_t>(cfg.n_mels + 2));
  for (int i = 0; i < cfg.n_mels + 2; ++i) {
    edges[static_cast<std::size_t>(i)] =
        mel_to_hz(lo + (hi - lo) * i / (cfg.n_mels + 1));
  }
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(cfg.n_mels, bins);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double left = edges[static_cast<std::size_t>(m)];
    const double center = edges[static_cast<std::size_t>(m + 1)];
    const double right = edges[static_cast<std::size_t>(m + 2)];
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate / cfg.n_fft;
      const double up = (f - left) / (center - left);
      const double down = (right - f) / (right - center);
      fb(m, k) = std::max(0.0, std::min(up, down));
    }
    if (!(fb.row(m).sum() > 0.0)) {
      throw InvalidArgument("mel_filterbank: band " + std::to_string(m) +
                            " covers no FFT bin; lower n_mels or raise n_fft");
    }
  }
  return fb;
}

MelSpectrogram log_mel(const Waveform& w, const MelConfig& cfg) {
  cfg.validate();
  if (w.sample_rate != cfg.sample_rate) {
    throw InvalidArgument("log_mel: waveform rate " +
                          std::to_string(w.sample_rate) +
                          " != config rate " + std::to_string(cfg.sample_rate));
  }
  MelSpectrogram out;
  out.config = cfg;
  out.values = ((mel_filterbank(cfg) * power_stft(w, cfg)).array() + kLogMelFloor)
                   .log()
                   .matrix();
  return out;
}

FeatureVector pool_stats(const MelSpectrogram& m) {
  const Eigen::Index frames = m.values.cols();
  if (frames < 2) throw InvalidArgument("pool_stats: need at least 2 frames");
  const Eigen::Index bands = m.values.rows();
  FeatureVector out(2 * bands);
  for (Eigen::Index b = 0; b < bands; ++b) {
    const double mean = m.values.row(b).mean();
    const double var =
        (m.values.row(b).array() - mean).square().sum() / static_cast<double>(frames);
    out(b) = mean;
    out(bands + b) = std::sqrt(var);
  }
  return out;
}

FeatureVector extract_features(const Waveform& w, const MelConfig& cfg,
                               double duration_s) {
  return pool_stats(
      log_mel(fix_duration(resample(w, cfg.sample_rate), duration_s), cfg));
}

}  // namespace codecwb
