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

#include "marsseg/threading.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace marsseg {

namespace {
std::atomic<int> g_num_threads{1};
}

void set_num_threads(int n) {
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    g_num_threads.store(std::max(1, n));
}

int num_threads() {
    return g_num_threads.load();
}

void parallel_for(size_t n, const std::function<void(size_t, size_t, int)>& fn) {
    if (n == 0) return;
    int workers = std::min<size_t>(static_cast<size_t>(num_threads()), n);
    if (workers <= 1) {
        fn(0, n, 0);
        return;
    }
    size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        size_t begin = static_cast<size_t>(w) * chunk;
        size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end, w] { fn(begin, end, w); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace marsseg
