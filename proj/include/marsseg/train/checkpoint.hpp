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

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "marsseg/model/seg_model.hpp"

namespace marsseg::train {

// On-disk format: magic "MSEGCKP1", u32 version, length-prefixed config JSON
// (architecture + provenance), tensor directory (name, dtype, shape, byte
// offset), payload length + FNV-1a hash, then raw little-endian f32 payload.
struct Checkpoint {
    uint32_t version = 1;
    model::EncoderConfig encoder;
    model::ProjectionConfig projection;
    model::AtrousConfig atrous;
    nlohmann::json provenance;  // config hash, epoch, metric history, taxonomy
    std::vector<std::pair<std::string, nn::Tensor>> tensors;
};

Checkpoint snapshot_model(model::SegModel& m, nlohmann::json provenance);

// Copies checkpoint tensors into the model; with prefixes given, only
// tensors whose name starts with one of them. Missing or shape-mismatched
// tensors raise an error listing every offender.
void load_into_model(const Checkpoint& ckpt, model::SegModel& m,
                     const std::vector<std::string>& prefixes = {});

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Rebuild the architecture recorded in the checkpoint and load all tensors.
std::unique_ptr<model::SegModel> model_from_checkpoint(const Checkpoint& ckpt);

}  // namespace marsseg::train
