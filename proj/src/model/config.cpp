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

#include "marsseg/model/config.hpp"

#include <cmath>

#include "marsseg/common.hpp"

namespace marsseg::model {

namespace {
constexpr int kBaseStageFilters = 64;

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    return it->get<T>();
}
}  // namespace

void validate(const EncoderConfig& cfg) {
    if (cfg.stage_block_counts.empty()) throw ConfigError("encoder: stageBlockCounts empty");
    for (int n : cfg.stage_block_counts) {
        if (n < 1) throw ConfigError("encoder: stage block count must be >= 1");
    }
    if (cfg.width_multiplier <= 0.0) throw ConfigError("encoder: widthMultiplier must be > 0");
    if (cfg.input_channels < 1) throw ConfigError("encoder: inputChannels must be >= 1");
    if (cfg.sk_reduction < 1) throw ConfigError("encoder: skReduction must be >= 1");
    if (cfg.sk_min_attention_width < 1) {
        throw ConfigError("encoder: skMinAttentionWidth must be >= 1");
    }
    encoder_stage_widths(cfg);  // rejects non-integral widths
}

void validate(const ProjectionConfig& cfg) {
    if (cfg.layer_count < 1) throw ConfigError("projection: layerCount must be >= 1");
    if (cfg.hidden_width < 1) throw ConfigError("projection: hiddenWidth must be >= 1");
    if (cfg.output_dim < 1) throw ConfigError("projection: outputDim must be >= 1");
    if (cfg.finetune_attach_layer < 0 || cfg.finetune_attach_layer >= cfg.layer_count) {
        throw ConfigError(fmt::format("projection: finetuneAttachLayer {} outside [0,{})",
                                      cfg.finetune_attach_layer, cfg.layer_count));
    }
}

void validate(const AtrousConfig& cfg) {
    if (cfg.dilation_rates.empty()) throw ConfigError("atrous: dilationRates empty");
    for (int d : cfg.dilation_rates) {
        if (d < 1) throw ConfigError("atrous: dilation rate must be >= 1");
    }
    if (cfg.filters_per_branch < 1) throw ConfigError("atrous: filtersPerBranch must be >= 1");
    if (cfg.kernel_size < 1 || cfg.kernel_size % 2 == 0) {
        throw ConfigError("atrous: kernelSize must be odd and >= 1");
    }
    if (cfg.num_classes < 2) throw ConfigError("atrous: numClasses must be >= 2");
    if (cfg.output_h < 1 || cfg.output_w < 1) throw ConfigError("atrous: outputSize must be >= 1");
}

std::vector<int> encoder_stage_widths(const EncoderConfig& cfg) {
    std::vector<int> widths;
    widths.reserve(cfg.stage_block_counts.size());
    for (size_t i = 0; i < cfg.stage_block_counts.size(); ++i) {
        double w = kBaseStageFilters * std::pow(2.0, static_cast<double>(i)) *
                   cfg.width_multiplier;
        double rounded = std::round(w);
        if (std::abs(w - rounded) > 1e-9 || rounded < 1.0) {
            throw ConfigError(fmt::format(
                "encoder: stage {} width {} not a positive integer (widthMultiplier {})", i + 1, w,
                cfg.width_multiplier));
        }
        widths.push_back(static_cast<int>(rounded));
    }
    return widths;
}

int encoder_output_channels(const EncoderConfig& cfg) {
    return encoder_stage_widths(cfg).back() * 4;
}

int encoder_output_stride(const EncoderConfig& cfg) {
    return 4 << (static_cast<int>(cfg.stage_block_counts.size()) - 1);
}

void to_json(nlohmann::json& j, const EncoderConfig& cfg) {
    j = nlohmann::json{{"stageBlockCounts", cfg.stage_block_counts},
                       {"widthMultiplier", cfg.width_multiplier},
                       {"useSelectiveKernels", cfg.use_selective_kernels},
                       {"inputChannels", cfg.input_channels},
                       {"skReduction", cfg.sk_reduction},
                       {"skMinAttentionWidth", cfg.sk_min_attention_width}};
}

void from_json(const nlohmann::json& j, EncoderConfig& cfg) {
    EncoderConfig d;
    cfg.stage_block_counts = get_or(j, "stageBlockCounts", d.stage_block_counts);
    cfg.width_multiplier = get_or(j, "widthMultiplier", d.width_multiplier);
    cfg.use_selective_kernels = get_or(j, "useSelectiveKernels", d.use_selective_kernels);
    cfg.input_channels = get_or(j, "inputChannels", d.input_channels);
    cfg.sk_reduction = get_or(j, "skReduction", d.sk_reduction);
    cfg.sk_min_attention_width = get_or(j, "skMinAttentionWidth", d.sk_min_attention_width);
}

void to_json(nlohmann::json& j, const ProjectionConfig& cfg) {
    j = nlohmann::json{{"layerCount", cfg.layer_count},
                       {"hiddenWidth", cfg.hidden_width},
                       {"outputDim", cfg.output_dim},
                       {"finetuneAttachLayer", cfg.finetune_attach_layer}};
}

void from_json(const nlohmann::json& j, ProjectionConfig& cfg) {
    ProjectionConfig d;
    cfg.layer_count = get_or(j, "layerCount", d.layer_count);
    cfg.hidden_width = get_or(j, "hiddenWidth", d.hidden_width);
    cfg.output_dim = get_or(j, "outputDim", d.output_dim);
    cfg.finetune_attach_layer = get_or(j, "finetuneAttachLayer", d.finetune_attach_layer);
}

void to_json(nlohmann::json& j, const AtrousConfig& cfg) {
    j = nlohmann::json{{"dilationRates", cfg.dilation_rates},
                       {"filtersPerBranch", cfg.filters_per_branch},
                       {"kernelSize", cfg.kernel_size},
                       {"numClasses", cfg.num_classes},
                       {"outputSize", {cfg.output_h, cfg.output_w}}};
}

void from_json(const nlohmann::json& j, AtrousConfig& cfg) {
    AtrousConfig d;
    cfg.dilation_rates = get_or(j, "dilationRates", d.dilation_rates);
    cfg.filters_per_branch = get_or(j, "filtersPerBranch", d.filters_per_branch);
    cfg.kernel_size = get_or(j, "kernelSize", d.kernel_size);
    cfg.num_classes = get_or(j, "numClasses", d.num_classes);
    if (j.contains("outputSize")) {
        auto sz = j.at("outputSize");
        MSEG_CHECK(sz.is_array() && sz.size() == 2, "atrous: outputSize must be [H, W]");
        cfg.output_h = sz[0].get<int>();
        cfg.output_w = sz[1].get<int>();
    } else {
        cfg.output_h = d.output_h;
        cfg.output_w = d.output_w;
    }
}

}  // namespace marsseg::model
