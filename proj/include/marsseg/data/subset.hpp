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

#include <cstdint>

#include "marsseg/data/manifest.hpp"

namespace marsseg::data {

struct SubsetSpec {
    double fraction = 1.0;  // in (0,1]
    uint64_t seed = 0;
};

// round-half-up(fraction * total), at least 1
int64_t subset_size(double fraction, int64_t total);

// First subset_size items of the seeded permutation of the manifest, in
// permuted order. Smaller fractions are prefixes of larger ones under the
// same seed.
DatasetManifest subset(const DatasetManifest& manifest, const SubsetSpec& spec);

}  // namespace marsseg::data
