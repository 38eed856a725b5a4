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

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace codecwb {

// Samples per mini-batch for each domain tag, in tag order.
struct DomainPlan {
  std::vector<std::string> domains;
  std::vector<int> counts;
  int batch_size = 0;

  int count(const std::string& domain) const;  // 0 when absent
  std::string describe() const;                // "A=31 B=1"
};

// floor(len_d * batch_size / sum(len)) per domain, computed exactly in
// integers. No clamping, no remainder.
std::vector<std::int64_t> proportional_floors(std::span<const std::int64_t> sizes,
                                              int batch_size);

// Proportional floors, clamped to at least one slot per domain. Leftover
// slots go one at a time to domains in descending size order (ties by tag),
// cycling if needed; an overshoot caused by clamping is taken back from the
// largest domains first, never below one.
DomainPlan batch_counts(const std::map<std::string, std::int64_t>& domain_sizes,
                        int batch_size);

using BatchIndices = std::vector<std::size_t>;  // record indices

// Domain-proportional batches for one epoch. Each domain's records are
// shuffled independently (stream keyed by seed, domain and epoch); every
// batch takes plan.counts[d] records from domain d, wrapping around a
// domain's shuffled order once it is exhausted. The epoch has
// ceil(max_d len_d / plan_d) batches. `record_domains[i]` is the tag of
// record i.
std::vector<BatchIndices> make_batches(std::span<const std::string> record_domains,
                                const DomainPlan& plan, std::uint64_t seed,
                                int epoch);

// Plain shuffled batching of n records; the final batch may be short.
std::vector<BatchIndices> make_uniform_batches(std::size_t n, int batch_size,
                                        std::uint64_t seed, int epoch);

}  // namespace codecwb
