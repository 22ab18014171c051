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

#include "marsseg/data/subset.hpp"

#include <cmath>

#include "marsseg/common.hpp"
#include "marsseg/rng.hpp"

namespace marsseg::data {

int64_t subset_size(double fraction, int64_t total) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ConfigError(fmt::format("subset: fraction {} outside (0,1]", fraction));
    }
    const int64_t n = static_cast<int64_t>(std::floor(fraction * static_cast<double>(total) + 0.5));
    return std::max<int64_t>(1, std::min(n, total));
}

DatasetManifest subset(const DatasetManifest& manifest, const SubsetSpec& spec) {
    if (manifest.items.empty()) throw DataError("subset: empty manifest");
    const int64_t total = manifest.total_count();
    const int64_t count = subset_size(spec.fraction, total);
    const std::vector<size_t> perm = seeded_permutation(static_cast<size_t>(total), spec.seed);
    DatasetManifest out;
    out.split = manifest.split;
    out.items.reserve(static_cast<size_t>(count));
    for (int64_t i = 0; i < count; ++i) {
        out.items.push_back(manifest.items[perm[static_cast<size_t>(i)]]);
    }
    return out;
}

}  // namespace marsseg::data
