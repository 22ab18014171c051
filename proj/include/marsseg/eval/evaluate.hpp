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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "marsseg/data/manifest.hpp"
#include "marsseg/eval/metrics.hpp"
#include "marsseg/model/seg_model.hpp"

namespace marsseg::eval {

struct EvalResult {
    ConfusionMatrix cm;
    double accuracy = 0.0;
    std::array<std::optional<double>, data::kNumClasses> recall;
    int64_t images = 0;
    std::vector<std::string> warnings;
};

// Runs the segmentation path in inference mode over every labeled item of
// the manifest at image_size and accumulates pixel metrics. No test-time
// augmentation. on_prediction (optional) receives each item's flattened
// class-id map, e.g. to write prediction masks.
EvalResult evaluate_model(
    model::SegModel& m, const data::DatasetManifest& manifest, int image_size, int batch_size = 4,
    const std::function<void(const data::RawSample&, const std::vector<uint8_t>&)>& on_prediction =
        {});

// Same metrics, but predictions come from grayscale class-id PNGs named
// <image stem>.png inside predictions_dir (one per labeled item, at label
// resolution).
EvalResult evaluate_predictions(const std::filesystem::path& predictions_dir,
                                const data::DatasetManifest& manifest, int image_size);

}  // namespace marsseg::eval
