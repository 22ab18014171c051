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
#include <utility>

#include <nlohmann/json.hpp>

#include "marsseg/tensor.hpp"

namespace marsseg::augment {

struct AugmentConfig {
    double crop_scale_min = 0.3;  // area fraction
    double crop_scale_max = 1.0;
    double color_jitter_strength = 0.5;
    double blur_probability = 0.5;
    double blur_sigma_min = 0.1;
    double blur_sigma_max = 2.0;
    int output_size = 512;
};

void validate(const AugmentConfig& cfg);
void to_json(nlohmann::json& j, const AugmentConfig& cfg);
void from_json(const nlohmann::json& j, AugmentConfig& cfg);

// One stochastic chain: random resized crop -> luminance jitter
// (brightness + contrast) -> optional gaussian blur -> clip to [0,1].
nn::Tensor augment_view(const nn::Tensor& image, const AugmentConfig& cfg, uint64_t seed);

// Two independently sampled chains over the same source; pure in the source.
std::pair<nn::Tensor, nn::Tensor> augment_pair(const nn::Tensor& image, const AugmentConfig& cfg,
                                               uint64_t seed);

}  // namespace marsseg::augment
