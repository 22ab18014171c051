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

#include "marsseg/eval/evaluate.hpp"

#include <algorithm>
#include <cstring>

#include <fmt/format.h>

#include "marsseg/common.hpp"
#include "marsseg/data/preprocess.hpp"
#include "marsseg/image.hpp"

namespace marsseg::eval {

EvalResult evaluate_model(
    model::SegModel& m, const data::DatasetManifest& manifest, int image_size, int batch_size,
    const std::function<void(const data::RawSample&, const std::vector<uint8_t>&)>& on_prediction) {
    MSEG_CHECK(image_size > 0, "image_size must be positive, got {}", image_size);
    MSEG_CHECK(batch_size > 0, "batch_size must be positive, got {}", batch_size);

    std::vector<const data::RawSample*> labeled;
    for (const auto& item : manifest.items)
        if (item.label_path) labeled.push_back(&item);
    if (labeled.empty()) throw DataError("evaluation manifest has no labeled items");

    m.head().set_output_size(image_size, image_size);

    EvalResult result;
    const int64_t s = image_size;
    for (size_t start = 0; start < labeled.size(); start += static_cast<size_t>(batch_size)) {
        const size_t count = std::min(static_cast<size_t>(batch_size), labeled.size() - start);
        Tensor batch({static_cast<int64_t>(count), s, s, 3});
        std::vector<std::vector<uint8_t>> labels(count);
        for (size_t i = 0; i < count; ++i) {
            const data::Sample sample = data::load_sample(*labeled[start + i], image_size);
            std::memcpy(batch.data() + static_cast<int64_t>(i) * s * s * 3, sample.image.data(),
                        sizeof(float) * static_cast<size_t>(s * s * 3));
            labels[i] = sample.labels;
        }
        const Tensor features = m.encode(batch, /*training=*/false);
        const Tensor logits = m.segment(features, /*training=*/false);
        const std::vector<uint8_t> preds = argmax_predictions(logits);
        const size_t per_image = static_cast<size_t>(s * s);
        for (size_t i = 0; i < count; ++i) {
            std::vector<uint8_t> pred_i(preds.begin() + static_cast<int64_t>(i * per_image),
                                        preds.begin() + static_cast<int64_t>((i + 1) * per_image));
            result.cm.merge(confusion(pred_i, labels[i]));
            if (on_prediction) on_prediction(*labeled[start + i], pred_i);
            ++result.images;
        }
    }
    result.accuracy = result.cm.accuracy();
    result.recall = per_class_recall(result.cm);
    return result;
}

EvalResult evaluate_predictions(const std::filesystem::path& predictions_dir,
                                const data::DatasetManifest& manifest, int image_size) {
    if (!std::filesystem::is_directory(predictions_dir))
        throw DataError(fmt::format("prediction directory not found: {}", predictions_dir.string()));

    EvalResult result;
    bool any_labeled = false;
    for (const auto& item : manifest.items) {
        if (!item.label_path) continue;
        any_labeled = true;
        const auto pred_path = predictions_dir / (item.image_path.stem().string() + ".png");
        if (!std::filesystem::exists(pred_path))
            throw DataError(fmt::format("missing prediction for {}: {}",
                                        item.image_path.filename().string(), pred_path.string()));
        const ImageU8 pred_img = read_png(pred_path);
        if (pred_img.channels != 1)
            throw DataError(fmt::format("prediction {} must be grayscale class ids, got {} channels",
                                        pred_path.string(), pred_img.channels));
        if (pred_img.width != image_size || pred_img.height != image_size)
            throw DataError(fmt::format("prediction {} is {}x{}, expected {}x{}",
                                        pred_path.string(), pred_img.width, pred_img.height,
                                        image_size, image_size));
        const data::Sample sample = data::load_sample(item, image_size);
        result.cm.merge(confusion(pred_img.pixels, sample.labels));
        ++result.images;
    }
    if (!any_labeled) throw DataError("evaluation manifest has no labeled items");
    result.accuracy = result.cm.accuracy();
    result.recall = per_class_recall(result.cm);
    return result;
}

}  // namespace marsseg::eval
