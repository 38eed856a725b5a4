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
#include <codecwb/metrics.hpp>

namespace {

void BM_ComputeEer(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  codecwb::Rng rng(1);
  std::vector<double> bona(n), spoof(n);
  for (auto& s : bona) s = rng.normal() + 1.0;
  for (auto& s : spoof) s = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(codecwb::compute_eer(bona, spoof));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n));
}
BENCHMARK(BM_ComputeEer)->Range(256, 1 << 18);

}  // namespace
