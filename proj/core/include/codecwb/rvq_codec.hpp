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
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "codecwb/audio.hpp"

namespace codecwb {

// A toy neural-codec stand-in: sine-windowed orthonormal DCT frames with 50%
// overlap, residual vector quantization, overlap-add resynthesis.
struct CodecPreset {
  std::string name;
  int sample_rate = 16000;
  int hop = 320;
  int frame = 640;  // always 2 * hop
  int num_quantizers = 8;
  int codebook_bits = 10;
  double target_bps = 4000.0;  // informational; see achieved_bps()

  std::size_t codebook_size() const { return std::size_t{1} << codebook_bits; }
  void validate() const;
  bool operator==(const CodecPreset&) const = default;
};

inline constexpr int kMaxCodebookBits = 14;

// num_quantizers * codebook_bits * sample_rate / hop.
double achieved_bps(const CodecPreset& p);

// Derives codebook_bits = round(target_bps * hop / (nq * sr)) clamped to
// [1, kMaxCodebookBits].
CodecPreset make_preset(std::string name, int sample_rate, int hop,
                        int num_quantizers, double target_bps);

// Hop used by the built-in presets for a given sample rate.
int default_hop(int sample_rate);

// F01..F07 and C3-1..C4-3 analogs.
const std::vector<CodecPreset>& builtin_presets();
const CodecPreset* find_builtin_preset(std::string_view name);

using Frames = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Codebook = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
// [n_frames x num_quantizers]
using CodeIndices =
    Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct CorpusFingerprint {
  std::uint64_t count = 0;
  std::uint64_t hash = 0;
  bool operator==(const CorpusFingerprint&) const = default;
};

CorpusFingerprint fingerprint(const Frames& frames);

enum class TrainStatus { kOk, kDegenerate };

// Stage-wise centroid matrices, each [2^bits x frame]. Stages after the first
// keep the zero vector at index 0, so a later stage never increases a frame's
// residual energy.
struct CodebookSet {
  CodecPreset preset;
  std::vector<Codebook> stages;
  CorpusFingerprint trained_on;
  // residual_energy[s] = mean squared norm of training residuals after s
  // stages (index 0 is the raw frame energy).
  std::vector<double> residual_energy;
  TrainStatus status = TrainStatus::kOk;

  int num_stages() const { return static_cast<int>(stages.size()); }
};

// sin(pi (n + 0.5) / frame); satisfies w[n]^2 + w[n + hop]^2 = 1.
std::vector<double> sine_window(int frame);

// Windowed orthonormal DCT-II of every full frame; [n_frames x frame] with
// n_frames = floor((len - frame) / hop) + 1.
Frames analyze(const Waveform& w, const CodecPreset& p);

// Inverse DCT, sine window, 50% overlap-add. Output length is
// (n_frames - 1) * hop + frame.
Waveform synthesize(const Frames& frames, const CodecPreset& p);

// Pads a codec-rate waveform with one hop of leading zeros and enough
// trailing zeros that every original sample is covered by two frames.
Waveform pad_for_codec(const Waveform& w, const CodecPreset& p);

// resample -> pad_for_codec -> analyze; the framing transcode() uses.
Frames codec_frames(const Waveform& w, const CodecPreset& p);

struct CodebookTrainingOptions {
  int iterations = 20;
  // 0 keeps every frame; otherwise a seeded subsample of this size is used.
  std::size_t max_frames = 0;
};

// k-means++ seeding and Lloyd iterations per stage on the running residual.
// Throws InvalidArgument with fewer than 2^bits frames.
CodebookSet train_codebooks(const Frames& frames, const CodecPreset& p,
                            std::uint64_t seed,
                            const CodebookTrainingOptions& options = {});

CodeIndices rvq_encode(const Frames& frames, const CodebookSet& cb);

// Sum of the selected centroids of the first `stages` quantizers (all when
// negative).
Frames rvq_decode(const CodeIndices& idx, const CodebookSet& cb, int stages = -1);

// Re-encodes a waveform through the codec and returns it at its original
// rate and length.
Waveform transcode(const Waveform& w, const CodebookSet& cb);

void save_codebooks(const std::filesystem::path& path, const CodebookSet& cb);
CodebookSet load_codebooks(const std::filesystem::path& path);

}  // namespace codecwb
