// Copyright 2026 The marsseg Authors.
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

namespace marsseg {

// Global worker count. 0 resolves to hardware concurrency; 1 is the strict
// single-worker deterministic mode forced by the CLI --deterministic flag.
void set_num_threads(int n);
int num_threads();

// Splits [0, n) into one contiguous chunk per worker and runs
// fn(begin, end, worker_index). Chunk boundaries depend only on n and the
// worker count, so reductions that merge per-worker buffers in worker order
// are reproducible for a fixed thread setting.
void parallel_for(size_t n, const std::function<void(size_t, size_t, int)>& fn);

}  // namespace marsseg
