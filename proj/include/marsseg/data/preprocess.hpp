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
#include <optional>
#include <vector>

#include "marsseg/data/manifest.hpp"
#include "marsseg/image.hpp"
#include "marsseg/tensor.hpp"

namespace marsseg::data {

// Preprocessed image plus merged labels at the same resolution.
struct Sample {
    nn::Tensor image;             // (S,S,3), values in [0,1]
    std::vector<uint8_t> labels;  // S*S values in {0..5, 255}
};

// Nearest-neighbor resize to out_size^2, scale to [0,1], brighten by 1.5x,
// clip to [0,1]; grayscale replicated to 3 channels.
nn::Tensor preprocess(const ImageU8& raw, int out_size);

// Nearest-neighbor label downsample; never invents values.
ImageU8 resize_mask(const ImageU8& mask, int out_size);

// Precedence rover > range > terrain. Terrain values must lie in {0..3,255};
// mask pixels > 0 count as set.
std::vector<uint8_t> merge_masks(const ImageU8& terrain, const ImageU8* rover,
                                 const ImageU8* range);

// Full ingestion of one manifest item; items without a label yield all-255
// labels (pretraining corpus).
Sample load_sample(const RawSample& raw, int out_size);

}  // namespace marsseg::data
