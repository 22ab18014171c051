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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "marsseg/common.hpp"
#include "marsseg/data/synth.hpp"
#include "marsseg/eval/sweep.hpp"
#include "marsseg/model/config.hpp"
#include "marsseg/train/trainer.hpp"

namespace marsseg::cli {

inline constexpr const char* kDataRootEnv = "MARSSEG_DATA_ROOT";

// Similarity grid for the contrastive-loss surface export.
struct LossSurfaceConfig {
    double pos_min = 0.05;
    double pos_max = 20.0;
    double neg_min = 0.0;
    double neg_max = 20.0;
    int resolution = 40;  // samples per axis
};

void validate(const LossSurfaceConfig& cfg);
void to_json(nlohmann::json& j, const LossSurfaceConfig& cfg);
void from_json(const nlohmann::json& j, LossSurfaceConfig& cfg);

// Fully resolved experiment configuration: library defaults, overridden by
// the JSON config file, overridden by CLI flags. The resolved form is echoed
// into every run manifest.
struct RunConfig {
    std::filesystem::path data_root;  // flag > config file > environment
    model::EncoderConfig encoder;
    model::ProjectionConfig projection;
    model::AtrousConfig atrous;
    train::PretrainConfig pretrain;
    train::FinetuneConfig finetune;
    data::SynthConfig synth;
    eval::SweepConfig sweep;
    LossSurfaceConfig loss_surface;

    // Applies a shared image size to the pretrain/finetune pipelines and the
    // head output (0 leaves per-section values untouched).
    void apply_image_size(int image_size);

    nlohmann::json to_json() const;
};

// Parses the config file (every section optional) over library defaults.
// A top-level "imageSize" is applied across sections after parsing.
RunConfig load_run_config(const std::optional<std::filesystem::path>& config_file);

// Provenance for one CLI invocation. The hash covers command, resolved
// config, and seed — not the timestamp — so identical runs emit byte-equal
// artifacts; every output file references it.
struct RunManifest {
    std::string command;
    nlohmann::json config;
    uint64_t seed = 0;
    std::string code_version{std::string(kCodeVersion)};
    int format_version = 1;
    std::string timestamp;  // UTC, informational only
    std::vector<std::string> outputs;

    std::string hash() const;
    nlohmann::json to_json() const;
    void save(const std::filesystem::path& path) const;
};

std::string utc_timestamp();

// --out override wins; otherwise runs/<timestamp>-<hash prefix> under cwd.
std::filesystem::path make_run_dir(const std::filesystem::path& out_override,
                                   const std::string& hash);

}  // namespace marsseg::cli
