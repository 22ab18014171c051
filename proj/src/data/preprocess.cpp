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

#include "marsseg/data/preprocess.hpp"

#include <algorithm>

#include "marsseg/common.hpp"
#include "marsseg/data/taxonomy.hpp"

namespace marsseg::data {

nn::Tensor preprocess(const ImageU8& raw, int out_size) {
    MSEG_CHECK(raw.width > 0 && raw.height > 0, "preprocess: empty image");
    MSEG_CHECK(raw.channels == 1 || raw.channels == 3, "preprocess: {} channels unsupported",
               raw.channels);
    ImageU8 resized = resize_nearest(raw, out_size, out_size);
    nn::Tensor out({out_size, out_size, 3});
    float* op = out.data();
    const uint8_t* ip = resized.pixels.data();
    const int64_t pixels = static_cast<int64_t>(out_size) * out_size;
    for (int64_t p = 0; p < pixels; ++p) {
        for (int c = 0; c < 3; ++c) {
            const uint8_t v = ip[p * resized.channels + (resized.channels == 3 ? c : 0)];
            op[p * 3 + c] = std::min(1.0f, static_cast<float>(v) / 255.0f * 1.5f);
        }
    }
    return out;
}

ImageU8 resize_mask(const ImageU8& mask, int out_size) {
    MSEG_CHECK(mask.channels == 1, "resize_mask: expected single-channel mask, got {}",
               mask.channels);
    return resize_nearest(mask, out_size, out_size);
}

std::vector<uint8_t> merge_masks(const ImageU8& terrain, const ImageU8* rover,
                                 const ImageU8* range) {
    MSEG_CHECK(terrain.channels == 1, "merge_masks: terrain must be single-channel");
    for (const ImageU8* m : {rover, range}) {
        if (m) {
            MSEG_CHECK(m->width == terrain.width && m->height == terrain.height &&
                           m->channels == 1,
                       "merge_masks: mask {}x{}x{} vs terrain {}x{}", m->width, m->height,
                       m->channels, terrain.width, terrain.height);
        }
    }
    const size_t n = terrain.pixels.size();
    std::vector<uint8_t> out(n);
    for (size_t p = 0; p < n; ++p) {
        const uint8_t t = terrain.pixels[p];
        if (t != kNullLabel && t >= kNumTerrainClasses) {
            throw DataError(fmt::format("merge_masks: terrain value {} at pixel {} outside "
                                        "{{0..3,255}}",
                                        t, p));
        }
        if (rover && rover->pixels[p] > 0) {
            out[p] = kRover;
        } else if (range && range->pixels[p] > 0) {
            out[p] = kBackground;
        } else {
            out[p] = t;
        }
    }
    return out;
}

Sample load_sample(const RawSample& raw, int out_size) {
    Sample sample;
    ImageU8 img = read_png(raw.image_path);
    sample.image = preprocess(img, out_size);

    std::optional<ImageU8> rover, range;
    if (raw.rover_mask_path) rover = read_png(*raw.rover_mask_path);
    if (raw.range_mask_path) range = read_png(*raw.range_mask_path);

    ImageU8 terrain;
    if (raw.label_path) {
        terrain = read_png(*raw.label_path);
        MSEG_CHECK(terrain.width == img.width && terrain.height == img.height,
                   "{}: label {}x{} vs image {}x{}", raw.label_path->string(), terrain.width,
                   terrain.height, img.width, img.height);
    } else {
        // pretraining-only item: everything ignored by the masked loss
        terrain.width = img.width;
        terrain.height = img.height;
        terrain.channels = 1;
        terrain.pixels.assign(static_cast<size_t>(img.width) * img.height, kNullLabel);
    }
    std::vector<uint8_t> merged =
        merge_masks(terrain, rover ? &*rover : nullptr, range ? &*range : nullptr);

    ImageU8 merged_img;
    merged_img.width = terrain.width;
    merged_img.height = terrain.height;
    merged_img.channels = 1;
    merged_img.pixels = std::move(merged);
    sample.labels = resize_mask(merged_img, out_size).pixels;
    return sample;
}

}  // namespace marsseg::data
