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
#include <optional>
#include <vector>

#include "marsseg/data/manifest.hpp"
#include "marsseg/data/taxonomy.hpp"
#include "marsseg/tensor.hpp"

namespace marsseg::eval {

// Pixel-level confusion counts over labeled pixels: row = true class,
// column = predicted class. Null (255) pixels never enter the matrix.
struct ConfusionMatrix {
    std::array<std::array<int64_t, data::kNumClasses>, data::kNumClasses> counts{};

    int64_t total() const;
    int64_t row_sum(int true_class) const;
    double accuracy() const;  // trace / total; requires total > 0

    // Row-normalized percentage view. Rows with no true pixels are undefined
    // (reported as "n/a" downstream), never silently zero.
    std::optional<double> normalized_percent(int true_class, int predicted) const;

    void merge(const ConfusionMatrix& other);
};

// Argmax over the trailing class axis of (B,H,W,C) logits, flattened to
// B*H*W class ids in row-major order.
std::vector<uint8_t> argmax_predictions(const Tensor& logits);

// Fraction of labeled pixels (label != 255) whose prediction matches.
// Throws DataError when no pixel is labeled.
double pixel_accuracy(const std::vector<uint8_t>& predictions,
                      const std::vector<uint8_t>& labels);

ConfusionMatrix confusion(const std::vector<uint8_t>& predictions,
                          const std::vector<uint8_t>& labels);

// recall[c] = counts[c][c] / rowSum[c]; nullopt when the row is empty.
std::array<std::optional<double>, data::kNumClasses> per_class_recall(const ConfusionMatrix& cm);

// Labeled-pixel counts per class across every labeled item of the manifest,
// with masks merged and resized to image_size. Empty or unlabeled manifests
// yield all zeros plus a warning.
std::array<int64_t, data::kNumClasses> class_distribution(
    const data::DatasetManifest& manifest, int image_size,
    std::vector<std::string>* warnings = nullptr);

}  // namespace marsseg::eval
