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

#include <benchmark/benchmark.h>

#include <codecwb/common.hpp>
#include <codecwb/rvq_codec.hpp>
#include <map>
#include <string>

namespace {

codecwb::Frames random_frames(Eigen::Index rows, int frame, std::uint64_t seed) {
  codecwb::Rng rng(seed);
  codecwb::Frames f(rows, frame);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = rng.normal();
  return f;
}

// Codebooks are trained once per preset and shared across runs.
const codecwb::CodebookSet& codebooks(const std::string& preset) {
  static std::map<std::string, codecwb::CodebookSet> cache;
  auto it = cache.find(preset);
  if (it == cache.end()) {
    const codecwb::CodecPreset& p = *codecwb::find_builtin_preset(preset);
    codecwb::CodebookTrainingOptions opt;
    opt.iterations = 2;
    const auto frames = random_frames(static_cast<Eigen::Index>(2 * p.codebook_size()), p.frame, 3);
    it = cache.emplace(preset, codecwb::train_codebooks(frames, p, 4, opt)).first;
  }
  return it->second;
}

void BM_RvqEncode(benchmark::State& state, const char* preset) {
  const auto& cb = codebooks(preset);
  // 4 s of frames at the preset's rate.
  const auto rows = static_cast<Eigen::Index>(4 * cb.preset.sample_rate / cb.preset.hop);
  const auto frames = random_frames(rows, cb.preset.frame, 5);
  for (auto _ : state) benchmark::DoNotOptimize(codecwb::rvq_encode(frames, cb));
  state.SetItemsProcessed(state.iterations() * rows);
}
BENCHMARK_CAPTURE(BM_RvqEncode, F01, "F01")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_RvqEncode, F03, "F03")->Unit(benchmark::kMillisecond);

void BM_Transcode(benchmark::State& state) {
  const auto& cb = codebooks("F01");
  codecwb::Waveform w;
  w.sample_rate = 16000;
  codecwb::Rng rng(6);
  w.samples.resize(4 * 16000);
  for (auto& s : w.samples) s = static_cast<float>(rng.uniform(-0.5, 0.5));
  for (auto _ : state) benchmark::DoNotOptimize(codecwb::transcode(w, cb));
}
BENCHMARK(BM_Transcode)->Unit(benchmark::kMillisecond);

}  // namespace
