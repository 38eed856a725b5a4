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

#include <codecwb/detector.hpp>
#include <codecwb/optim.hpp>

namespace {

void BM_TrainStep(benchmark::State& state, codecwb::Strategy strategy) {
  const int batch = static_cast<int>(state.range(0));
  codecwb::TrainConfig cfg;
  cfg.sam.variant = strategy;
  auto p = codecwb::init_params<float>(1);
  auto adam = codecwb::AdamState<float>::zeros(p.flat.size());
  codecwb::Rng rng(7);
  codecwb::Batch<float> x(batch, p.input_dim());
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = static_cast<float>(rng.normal());
  std::vector<codecwb::Label> y;
  for (int i = 0; i < batch; ++i) y.push_back(i % 2 == 0 ? codecwb::Label::kBonafide : codecwb::Label::kSpoof);
  for (auto _ : state) {
    benchmark::DoNotOptimize(codecwb::train_step(p, adam, x, y, cfg, 5e-4));
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK_CAPTURE(BM_TrainStep, erm, codecwb::Strategy::kErm)->Arg(32)->Arg(256);
BENCHMARK_CAPTURE(BM_TrainStep, sam, codecwb::Strategy::kSam)->Arg(32)->Arg(256);
BENCHMARK_CAPTURE(BM_TrainStep, asam, codecwb::Strategy::kAsam)->Arg(32)->Arg(256);

void BM_Score(benchmark::State& state) {
  const auto p = codecwb::init_params<float>(1);
  codecwb::Batch<float> x(1024, p.input_dim());
  x.setRandom();
  for (auto _ : state) benchmark::DoNotOptimize(codecwb::bonafide_probability(p, x));
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_Score);

}  // namespace
