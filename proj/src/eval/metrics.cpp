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

#include "marsseg/eval/metrics.hpp"

#include <fmt/format.h>

#include "marsseg/common.hpp"
#include "marsseg/data/preprocess.hpp"

namespace marsseg::eval {

namespace {
constexpr int kC = data::kNumClasses;
}  // namespace

int64_t ConfusionMatrix::total() const {
    int64_t n = 0;
    for (const auto& row : counts)
        for (int64_t v : row) n += v;
    return n;
}

int64_t ConfusionMatrix::row_sum(int true_class) const {
    int64_t n = 0;
    for (int64_t v : counts[true_class]) n += v;
    return n;
}

double ConfusionMatrix::accuracy() const {
    const int64_t n = total();
    if (n == 0) throw DataError("cannot compute accuracy: confusion matrix is empty");
    int64_t diag = 0;
    for (int c = 0; c < kC; ++c) diag += counts[c][c];
    return static_cast<double>(diag) / static_cast<double>(n);
}

std::optional<double> ConfusionMatrix::normalized_percent(int true_class, int predicted) const {
    const int64_t rs = row_sum(true_class);
    if (rs == 0) return std::nullopt;
    return 100.0 * static_cast<double>(counts[true_class][predicted]) / static_cast<double>(rs);
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
    for (int t = 0; t < kC; ++t)
        for (int p = 0; p < kC; ++p) counts[t][p] += other.counts[t][p];
}

std::vector<uint8_t> argmax_predictions(const Tensor& logits) {
    const auto& shape = logits.shape();
    if (shape.size() != 4)
        throw Error(fmt::format("argmax_predictions expects (B,H,W,C) logits, got {}", logits.shape_str()));
    const int64_t pixels = shape[0] * shape[1] * shape[2];
    const int64_t classes = shape[3];
    std::vector<uint8_t> out(static_cast<size_t>(pixels));
    const float* v = logits.data();
    for (int64_t i = 0; i < pixels; ++i) {
        const float* row = v + i * classes;
        int best = 0;
        for (int64_t c = 1; c < classes; ++c)
            if (row[c] > row[best]) best = static_cast<int>(c);
        out[static_cast<size_t>(i)] = static_cast<uint8_t>(best);
    }
    return out;
}

double pixel_accuracy(const std::vector<uint8_t>& predictions,
                      const std::vector<uint8_t>& labels) {
    if (predictions.size() != labels.size())
        throw Error(fmt::format("prediction/label size mismatch: {} vs {}", predictions.size(),
                                labels.size()));
    int64_t correct = 0;
    int64_t labeled = 0;
    for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == data::kNullLabel) continue;
        ++labeled;
        if (predictions[i] == labels[i]) ++correct;
    }
    if (labeled == 0) throw DataError("cannot compute accuracy: no labeled pixels");
    return static_cast<double>(correct) / static_cast<double>(labeled);
}

ConfusionMatrix confusion(const std::vector<uint8_t>& predictions,
                          const std::vector<uint8_t>& labels) {
    if (predictions.size() != labels.size())
        throw Error(fmt::format("prediction/label size mismatch: {} vs {}", predictions.size(),
                                labels.size()));
    ConfusionMatrix cm;
    for (size_t i = 0; i < labels.size(); ++i) {
        const uint8_t t = labels[i];
        if (t == data::kNullLabel) continue;
        const uint8_t p = predictions[i];
        if (t >= kC)
            throw DataError(fmt::format("label value {} outside taxonomy at pixel {}", t, i));
        if (p >= kC)
            throw DataError(fmt::format("prediction value {} outside taxonomy at pixel {}", p, i));
        ++cm.counts[t][p];
    }
    return cm;
}

std::array<std::optional<double>, kC> per_class_recall(const ConfusionMatrix& cm) {
    std::array<std::optional<double>, kC> recall;
    for (int c = 0; c < kC; ++c) {
        const int64_t rs = cm.row_sum(c);
        if (rs == 0) continue;
        recall[c] = static_cast<double>(cm.counts[c][c]) / static_cast<double>(rs);
    }
    return recall;
}

std::array<int64_t, kC> class_distribution(const data::DatasetManifest& manifest, int image_size,
                                           std::vector<std::string>* warnings) {
    std::array<int64_t, kC> dist{};
    int64_t labeled_items = 0;
    for (const auto& item : manifest.items) {
        if (!item.label_path) continue;
        ++labeled_items;
        const data::Sample sample = data::load_sample(item, image_size);
        for (uint8_t v : sample.labels) {
            if (v == data::kNullLabel) continue;
            ++dist[v];
        }
    }
    if (labeled_items == 0 && warnings != nullptr)
        warnings->push_back("class_distribution: manifest has no labeled items; all counts zero");
    return dist;
}

}  // namespace marsseg::eval
