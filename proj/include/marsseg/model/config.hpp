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

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace marsseg::model {

// Residual bottleneck encoder. Stage i uses 64 * 2^i * widthMultiplier filters
// in its bottleneck (x4 on the expansion conv); the multiplier must keep every
// width integral. Output stride is 4 (stem) times 2^(stages-1).
struct EncoderConfig {
    std::vector<int> stage_block_counts{3, 4, 6, 3};
    double width_multiplier = 2.0;
    bool use_selective_kernels = true;
    int input_channels = 3;
    int sk_reduction = 16;
    int sk_min_attention_width = 32;
};

// MLP projection head g(.). Layers 1..layerCount-1 are hiddenWidth wide with
// ReLU; the final layer maps to outputDim and the result is L2-normalized.
// finetuneAttachLayer dense layers are kept (applied per spatial position)
// when the segmentation head is attached.
struct ProjectionConfig {
    int layer_count = 3;
    int hidden_width = 128;
    int output_dim = 128;
    int finetune_attach_layer = 1;
};

// Atrous segmentation head: parallel 3x3 convolutions at the given dilation
// rates, concatenated, bilinearly resized to outputSize, then a 1x1
// convolution down to numClasses logits.
struct AtrousConfig {
    std::vector<int> dilation_rates{6, 12, 18};
    int filters_per_branch = 256;
    int kernel_size = 3;
    int num_classes = 6;
    int output_h = 512;
    int output_w = 512;
};

void validate(const EncoderConfig& cfg);
void validate(const ProjectionConfig& cfg);
void validate(const AtrousConfig& cfg);

// Per-stage bottleneck widths (before the x4 expansion); throws ConfigError
// when widthMultiplier produces a non-integral width, naming the stage.
std::vector<int> encoder_stage_widths(const EncoderConfig& cfg);
int encoder_output_channels(const EncoderConfig& cfg);
int encoder_output_stride(const EncoderConfig& cfg);

void to_json(nlohmann::json& j, const EncoderConfig& cfg);
void from_json(const nlohmann::json& j, EncoderConfig& cfg);
void to_json(nlohmann::json& j, const ProjectionConfig& cfg);
void from_json(const nlohmann::json& j, ProjectionConfig& cfg);
void to_json(nlohmann::json& j, const AtrousConfig& cfg);
void from_json(const nlohmann::json& j, AtrousConfig& cfg);

}  // namespace marsseg::model
