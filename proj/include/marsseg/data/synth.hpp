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

#include <array>
#include <cstdint>
#include <filesystem>

#include <nlohmann/json.hpp>

namespace marsseg::data {

// Procedural desk-scale dataset in the same on-disk layout as the real
// corpus: textured terrain regions per class, a rover silhouette mask, and a
// top-band range mask. Byte-identical output for identical configs.
struct SynthConfig {
    int num_train = 520;
    int num_test = 60;
    int image_size = 64;  // multiple of 32
    uint64_t seed = 7;
    // soil, bedrock, sand, bigRock pixel shares; must sum to 1
    std::array<double, 4> class_frequencies{0.58, 0.24, 0.16, 0.02};
    double color_fraction = 0.25;  // share of images written as RGB
};

void validate(const SynthConfig& cfg);
void to_json(nlohmann::json& j, const SynthConfig& cfg);
void from_json(const nlohmann::json& j, SynthConfig& cfg);

// Returns a summary (image counts, per-class pixel shares of the emitted
// terrain masks).
nlohmann::json synth_generate(const SynthConfig& cfg, const std::filesystem::path& root);

}  // namespace marsseg::data
