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

#include <cstddef>
#include <functional>

namespace codecwb {

// Worker count from WORKBENCH_WORKERS if set, else `configured`, clamped to
// at least 1.
int resolve_workers(int configured);

// Runs fn(i) for i in [0, n) on up to `workers` threads. Every index is
// visited exactly once; callers write results into pre-sized slots so the
// outcome does not depend on scheduling. The first exception thrown by fn is
// rethrown after all workers join.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace codecwb
