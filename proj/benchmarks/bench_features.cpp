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
#include <codecwb/features.hpp>

namespace {

codecwb::Waveform noise(double seconds) {
  codecwb::Waveform w;
  w.sample_rate = 16000;
  codecwb::Rng rng(2);
  w.samples.resize(static_cast<std::size_t>(seconds * 16000));
  for (auto& s : w.samples) s = static_cast<float>(rng.uniform(-0.5, 0.5));
  return w;
}

void BM_LogMel(benchmark::State& state) {
  const codecwb::Waveform w = noise(static_cast<double>(state.range(0)));
  const codecwb::MelConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(codecwb::log_mel(w, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.samples.size()));
}
BENCHMARK(BM_LogMel)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ExtractFeatures(benchmark::State& state) {
  const codecwb::Waveform w = noise(4.0);
  const codecwb::MelConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(codecwb::extract_features(w, cfg, 4.0));
}
BENCHMARK(BM_ExtractFeatures)->Unit(benchmark::kMillisecond);

}  // namespace
