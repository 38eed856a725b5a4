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
#include <codecwb/common.hpp>
#include <codecwb/rvq_codec.hpp>
#include <fstream>
#include <iterator>

#include "oracles.hpp"
#include "synth_audio.hpp"
#include "temp_dir.hpp"

using namespace codecwb;
using codecwb::testing::TempDir;

namespace {

// Small codec so that training takes milliseconds.
CodecPreset tiny_preset() {
  CodecPreset p;
  p.name = "T";
  p.sample_rate = 8000;
  p.hop = 40;
  p.frame = 80;
  p.num_quantizers = 3;
  p.codebook_bits = 4;
  return p;
}

Waveform noise(std::uint64_t seed, std::size_t n, int sr) {
  Rng rng(seed);
  Waveform w;
  w.sample_rate = sr;
  for (std::size_t i = 0; i < n; ++i) w.samples.push_back(0.2 * rng.normal());
  return w;
}

Frames tiny_frames(std::uint64_t seed) {
  Frames all(0, 80);
  for (int i = 0; i < 6; ++i) {
    const Waveform w = codecwb::testing::synth_utterance(derive_seed(seed, "t", i), 8000, 0.5);
    const Frames f = codec_frames(w, tiny_preset());
    Frames next(all.rows() + f.rows(), 80);
    next << all, f;
    all = next;
  }
  return all;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Presets, BitsFromTargetBitrate) {
  auto expect_bits = [](const std::string& name, double raw) {
    const CodecPreset* p = find_builtin_preset(name);
    ASSERT_NE(p, nullptr) << name;
    const long want = std::clamp(std::lround(raw), 1L, 14L);
    EXPECT_EQ(p->codebook_bits, want) << name;
    EXPECT_EQ(p->frame, 2 * p->hop);
  };
  expect_bits("F01", 4000.0 * 320 / (8 * 16000));
  expect_bits("F03", 16000.0 * 320 / (32 * 16000));
  expect_bits("F05", 6400.0 * 320 / (8 * 24000));
  expect_bits("F07", 8000.0 * 512 / (9 * 44100));
  expect_bits("C3-3", 12000.0 * 320 / (32 * 16000));
  expect_bits("C3-4", 24000.0 * 320 / (32 * 16000));
  EXPECT_EQ(find_builtin_preset("C3-4")->codebook_bits, kMaxCodebookBits);
  EXPECT_EQ(find_builtin_preset("nope"), nullptr);
  for (const auto& name : {"F01", "F02", "F03", "F04", "F05", "F06", "F07"}) {
    EXPECT_NE(find_builtin_preset(name), nullptr) << name;
  }
}

TEST(Presets, AchievedBitrate) {
  const CodecPreset p = make_preset("X", 16000, 320, 8, 4000);
  EXPECT_DOUBLE_EQ(achieved_bps(p), 8.0 * 10 * 16000 / 320);
  EXPECT_EQ(default_hop(16000), 320);
  EXPECT_EQ(default_hop(48000), 512);
  EXPECT_THROW(make_preset("Y", 16000, 0, 8, 4000), InvalidArgument);
  EXPECT_THROW(make_preset("Z", 16000, 320, 0, 4000), InvalidArgument);
}

TEST(SineWindow, PowerComplementary) {
  const auto w = sine_window(80);
  for (int n = 0; n < 40; ++n) EXPECT_NEAR(w[n] * w[n] + w[n + 40] * w[n + 40], 1.0, 1e-15);
}

TEST(Analyze, FramesAreWindowedOrthonormalDct) {
  const CodecPreset p = tiny_preset();
  const Waveform w = noise(1, 400, 8000);
  const Frames f = analyze(w, p);
  ASSERT_EQ(f.rows(), (400 - 80) / 40 + 1);
  const auto win = sine_window(80);
  for (int r : {0, 4, static_cast<int>(f.rows()) - 1}) {
    std::vector<double> x(80);
    for (int n = 0; n < 80; ++n) x[n] = w.samples[static_cast<std::size_t>(r * 40 + n)] * win[n];
    const auto ref = codecwb::testing::naive_dct2(x);
    for (int k = 0; k < 80; ++k) EXPECT_NEAR(f(r, k), ref[k], 1e-12);
  }
}

TEST(Synthesize, PerfectReconstructionInInterior) {
  const CodecPreset p = tiny_preset();
  const Waveform w = noise(2, 800, 8000);
  const Waveform y = synthesize(analyze(w, p), p);
  ASSERT_EQ(y.size(), 800u);
  for (std::size_t i = 40; i < 760; ++i) EXPECT_NEAR(y.samples[i], w.samples[i], 1e-12);
}

TEST(PadForCodec, EverySampleCoveredTwice) {
  const CodecPreset p = tiny_preset();
  const Waveform w = noise(3, 123, 8000);
  const Waveform padded = pad_for_codec(w, p);
  EXPECT_EQ(padded.samples.size() % 40, 0u);
  for (int i = 0; i < 40; ++i) EXPECT_EQ(padded.samples[i], 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(padded.samples[40 + i], w.samples[i]);
  // Last original sample lies in the interior of the synthesized span.
  EXPECT_GE(padded.samples.size(), 40 + w.size() + 40);
}

TEST(TrainCodebooks, PinnedZeroAndMonotoneResidual) {
  const Frames x = tiny_frames(1);
  const CodebookSet cb = train_codebooks(x, tiny_preset(), 7);
  ASSERT_EQ(cb.num_stages(), 3);
  ASSERT_EQ(cb.residual_energy.size(), 4u);
  EXPECT_NEAR(cb.residual_energy[0], x.rowwise().squaredNorm().mean(), 1e-12);
  for (int s = 1; s < 3; ++s) EXPECT_EQ(cb.stages[s].row(0).squaredNorm(), 0.0f);
  for (int s = 0; s < 3; ++s) {
    EXPECT_EQ(cb.stages[s].rows(), 16);
    EXPECT_LE(cb.residual_energy[s + 1], cb.residual_energy[s]);
  }
  EXPECT_EQ(cb.trained_on, fingerprint(x));
  EXPECT_EQ(cb.status, TrainStatus::kOk);
}

TEST(TrainCodebooks, DeterministicInSeed) {
  const Frames x = tiny_frames(2);
  const CodebookSet a = train_codebooks(x, tiny_preset(), 11);
  const CodebookSet b = train_codebooks(x, tiny_preset(), 11);
  const CodebookSet c = train_codebooks(x, tiny_preset(), 12);
  for (int s = 0; s < 3; ++s) EXPECT_EQ(a.stages[s], b.stages[s]);
  EXPECT_NE(a.stages[0], c.stages[0]);
}

TEST(TrainCodebooks, TooFewFramesRejected) {
  const Frames x = tiny_frames(3).topRows(15);
  EXPECT_THROW(train_codebooks(x, tiny_preset(), 1), InvalidArgument);
}

TEST(TrainCodebooks, SubsampleOption) {
  const Frames x = tiny_frames(4);
  CodebookTrainingOptions o;
  o.max_frames = 40;
  const CodebookSet cb = train_codebooks(x, tiny_preset(), 1, o);
  EXPECT_EQ(cb.num_stages(), 3);
  o.max_frames = 8;  // below the codebook size
  EXPECT_THROW(train_codebooks(x, tiny_preset(), 1, o), InvalidArgument);
}

TEST(Encode, FirstStagePicksNearestCentroid) {
  const Frames x = tiny_frames(5);
  const CodebookSet cb = train_codebooks(x, tiny_preset(), 3);
  const CodeIndices idx = rvq_encode(x, cb);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double best = INFINITY;
    for (Eigen::Index j = 0; j < 16; ++j) {
      best = std::min(best, (x.row(i) - cb.stages[0].row(j).cast<double>()).squaredNorm());
    }
    const double got = (x.row(i) - cb.stages[0].row(idx(i, 0)).cast<double>()).squaredNorm();
    // Search runs in float; allow float-level slack on exact ties.
    EXPECT_LE(got, best * (1 + 1e-5) + 1e-9) << i;
  }
}

TEST(Encode, PrefixResidualNeverGrows) {
  const Frames x = tiny_frames(6);
  const CodebookSet cb = train_codebooks(x, tiny_preset(), 4);
  const CodeIndices idx = rvq_encode(x, cb);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::RowVectorXd r = x.row(i);
    double prev = r.squaredNorm();
    for (int s = 0; s < 3; ++s) {
      r -= cb.stages[s].row(idx(i, s)).cast<double>();
      if (s > 0) {
        EXPECT_LE(r.squaredNorm(), prev) << i << "," << s;
      }
      prev = r.squaredNorm();
    }
  }
}

TEST(Decode, SumsSelectedCentroids) {
  const Frames x = tiny_frames(7);
  const CodebookSet cb = train_codebooks(x, tiny_preset(), 5);
  const CodeIndices idx = rvq_encode(x, cb);
  const Frames two = rvq_decode(idx, cb, 2);
  for (Eigen::Index i = 0; i < 5; ++i) {
    const Eigen::RowVectorXd want = cb.stages[0].row(idx(i, 0)).cast<double>() +
                                    cb.stages[1].row(idx(i, 1)).cast<double>();
    EXPECT_LE((two.row(i) - want).norm(), 1e-12);
  }
  EXPECT_EQ(rvq_decode(idx, cb, 0).squaredNorm(), 0.0);
  CodeIndices bad = idx;
  bad(0, 0) = 16;
  EXPECT_THROW(rvq_decode(bad, cb), InvalidArgument);
  EXPECT_THROW(rvq_decode(idx, cb, 4), InvalidArgument);
}

TEST(Transcode, KeepsRateAndLength) {
  const Frames x = tiny_frames(8);
  const CodebookSet cb = train_codebooks(x, tiny_preset(), 6);
  const Waveform w = codecwb::testing::synth_utterance(99, 11025, 0.3);
  const Waveform t = transcode(w, cb);
  EXPECT_EQ(t.sample_rate, 11025);
  EXPECT_EQ(t.size(), w.size());
  double err = 0.0, sig = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    err += (t.samples[i] - w.samples[i]) * (t.samples[i] - w.samples[i]);
    sig += w.samples[i] * w.samples[i];
  }
  EXPECT_LT(err, sig);  // lossy but correlated
}

TEST(CodebookFile, RoundTripIsExact) {
  TempDir dir("cb");
  const Frames x = tiny_frames(9);
  const CodebookSet cb = train_codebooks(x, tiny_preset(), 8);
  save_codebooks(dir / "a.cb", cb);
  const CodebookSet back = load_codebooks(dir / "a.cb");
  EXPECT_EQ(back.preset, cb.preset);
  EXPECT_EQ(back.trained_on, cb.trained_on);
  EXPECT_EQ(back.residual_energy, cb.residual_energy);
  ASSERT_EQ(back.num_stages(), 3);
  for (int s = 0; s < 3; ++s) EXPECT_EQ(back.stages[s], cb.stages[s]);
  save_codebooks(dir / "b.cb", back);
  EXPECT_EQ(slurp(dir / "a.cb"), slurp(dir / "b.cb"));
}

TEST(CodebookFile, RejectsCorruption) {
  TempDir dir("cb");
  const CodebookSet cb = train_codebooks(tiny_frames(10), tiny_preset(), 9);
  save_codebooks(dir / "a.cb", cb);
  const std::string bytes = slurp(dir / "a.cb");

  std::string other = bytes;
  other.replace(other.find(" 1\n"), 3, " 9\n");
  std::ofstream(dir / "v.cb", std::ios::binary) << other;
  EXPECT_THROW(load_codebooks(dir / "v.cb"), VersionError);

  std::ofstream(dir / "t.cb", std::ios::binary) << bytes.substr(0, bytes.size() - 3);
  EXPECT_THROW(load_codebooks(dir / "t.cb"), FormatError);

  std::ofstream(dir / "x.cb", std::ios::binary) << bytes << "xx";
  EXPECT_THROW(load_codebooks(dir / "x.cb"), FormatError);

  std::ofstream(dir / "m.cb", std::ios::binary) << "NOT-A-CODEBOOK 1\n";
  EXPECT_THROW(load_codebooks(dir / "m.cb"), FormatError);
}
