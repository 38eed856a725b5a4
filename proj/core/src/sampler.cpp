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

#include "codecwb/sampler.hpp"

#include <algorithm>
#include <numeric>

#include "codecwb/common.hpp"

namespace codecwb {

int DomainPlan::count(const std::string& domain) const {
  for (std::size_t i = 0; i < domains.size(); ++i) {
    if (domains[i] == domain) return counts[i];
  }
  return 0;
}

std::string DomainPlan::describe() const {
  std::string out;
  for (std::size_t i = 0; i < domains.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += domains[i] + '=' + std::to_string(counts[i]);
  }
  return out;
}

std::vector<std::int64_t> proportional_floors(std::span<const std::int64_t> sizes,
                                              int batch_size) {
  __int128 total = 0;
  for (auto s : sizes) {
    if (s < 0) throw InvalidArgument("proportional_floors: negative domain size");
    total += s;
  }
  if (total == 0) throw InvalidArgument("proportional_floors: all domains empty");
  std::vector<std::int64_t> out;
  out.reserve(sizes.size());
  for (auto s : sizes) {
    out.push_back(static_cast<std::int64_t>(static_cast<__int128>(s) * batch_size / total));
  }
  return out;
}

DomainPlan batch_counts(const std::map<std::string, std::int64_t>& domain_sizes,
                        int batch_size) {
  const auto n = domain_sizes.size();
  if (n == 0) throw InvalidArgument("batch_counts: no domains");
  if (batch_size < static_cast<int>(n)) {
    throw InvalidArgument("batch_counts: batch size " + std::to_string(batch_size) +
                          " is smaller than the number of domains (" +
                          std::to_string(n) + ")");
  }
  DomainPlan plan;
  plan.batch_size = batch_size;
  std::vector<std::int64_t> sizes;
  for (const auto& [tag, size] : domain_sizes) {
    if (size < 1) throw InvalidArgument("batch_counts: domain '" + tag + "' is empty");
    plan.domains.push_back(tag);
    sizes.push_back(size);
  }
  const auto floors = proportional_floors(sizes, batch_size);
  for (auto f : floors) plan.counts.push_back(std::max<int>(1, static_cast<int>(f)));

  // Descending size; std::map order already sorts ties by tag.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sizes[a] > sizes[b]; });

  int sum = std::accumulate(plan.counts.begin(), plan.counts.end(), 0);
  for (std::size_t k = 0; sum < batch_size; k = (k + 1) % n, ++sum) {
    ++plan.counts[order[k]];
  }
  while (sum > batch_size) {
    bool removed = false;
    for (auto i : order) {
      if (plan.counts[i] > 1) {
        --plan.counts[i];
        --sum;
        removed = true;
        break;
      }
    }
    if (!removed) break;  // unreachable given batch_size >= n
  }
  return plan;
}

std::vector<BatchIndices> make_batches(std::span<const std::string> record_domains,
                                const DomainPlan& plan, std::uint64_t seed,
                                int epoch) {
  std::vector<std::vector<std::size_t>> pools(plan.domains.size());
  for (std::size_t i = 0; i < record_domains.size(); ++i) {
    for (std::size_t d = 0; d < plan.domains.size(); ++d) {
      if (record_domains[i] == plan.domains[d]) {
        pools[d].push_back(i);
        break;
      }
    }
  }
  std::size_t n_batches = 0;
  for (std::size_t d = 0; d < pools.size(); ++d) {
    if (pools[d].empty()) {
      throw InvalidArgument("make_batches: no records for domain '" + plan.domains[d] + "'");
    }
    if (plan.counts[d] < 1) {
      throw InvalidArgument("make_batches: plan gives domain '" + plan.domains[d] +
                            "' no slots");
    }
    Rng rng(derive_seed(seed, "batching/" + plan.domains[d],
                        static_cast<std::uint64_t>(epoch)));
    rng.shuffle(pools[d]);
    const auto per = static_cast<std::size_t>(plan.counts[d]);
    n_batches = std::max(n_batches, (pools[d].size() + per - 1) / per);
  }

  std::vector<BatchIndices> batches(n_batches);
  std::vector<std::size_t> cursor(pools.size(), 0);
  for (auto& batch : batches) {
    batch.reserve(static_cast<std::size_t>(plan.batch_size));
    for (std::size_t d = 0; d < pools.size(); ++d) {
      for (int k = 0; k < plan.counts[d]; ++k) {
        batch.push_back(pools[d][cursor[d]]);
        cursor[d] = (cursor[d] + 1) % pools[d].size();
      }
    }
  }
  return batches;
}

std::vector<BatchIndices> make_uniform_batches(std::size_t n, int batch_size,
                                        std::uint64_t seed, int epoch) {
  if (batch_size < 1) throw InvalidArgument("make_uniform_batches: batch_size < 1");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "batching", static_cast<std::uint64_t>(epoch)));
  rng.shuffle(order);
  std::vector<BatchIndices> batches;
  const auto per = static_cast<std::size_t>(batch_size);
  for (std::size_t start = 0; start < n; start += per) {
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(n, start + per)));
  }
  return batches;
}

}  // namespace codecwb
