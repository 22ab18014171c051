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
#include <optional>
#include <string>
#include <vector>

namespace marsseg::data {

enum class Split { train, test };
std::string_view split_name(Split s);
Split split_from_string(std::string_view s);

enum class CameraKind { navcam_gray, mastcam_color };
std::string_view camera_name(CameraKind c);

struct RawSample {
    std::filesystem::path image_path;
    std::optional<std::filesystem::path> label_path;
    std::optional<std::filesystem::path> rover_mask_path;
    std::optional<std::filesystem::path> range_mask_path;
    CameraKind camera = CameraKind::navcam_gray;
    int width = 0;
    int height = 0;
};

struct DatasetManifest {
    std::vector<RawSample> items;  // lexicographic by image_path
    Split split = Split::train;
    std::vector<std::string> warnings;  // item-level errors (item excluded)

    int64_t total_count() const { return static_cast<int64_t>(items.size()); }
    int64_t labeled_count() const;
};

// Directory layout: images/<name>.png, labels/<split>/<name>.png,
// masks/rover/<name>.png, masks/range/<name>.png. The train manifest holds
// every image not labeled in the test split (unlabeled images feed
// pretraining); the test manifest holds only test-labeled images. Masks with
// unreadable or mismatched headers exclude the item with a recorded warning.
DatasetManifest load_manifest(const std::filesystem::path& root, Split split);

// Line-oriented cache: faster reload and a human-auditable record.
void save_manifest_cache(const DatasetManifest& manifest, const std::filesystem::path& file);
DatasetManifest load_manifest_cache(const std::filesystem::path& file);

}  // namespace marsseg::data
