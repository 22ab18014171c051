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

#include "marsseg/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "marsseg/common.hpp"
#include "marsseg/data/subset.hpp"
#include "marsseg/data/taxonomy.hpp"
#include "marsseg/losses/losses.hpp"
#include "marsseg/nn/sgd.hpp"
#include "marsseg/rng.hpp"

namespace marsseg::train {

using nn::Tensor;

void validate(const PretrainConfig& cfg) {
    if (cfg.batch_size < 2) throw ConfigError("pretrain: batchSizePretrain must be >= 2");
    if (cfg.steps < 0 || cfg.epochs < 0) throw ConfigError("pretrain: negative step/epoch budget");
    if (cfg.learning_rate <= 0.0) throw ConfigError("pretrain: learningRate must be > 0");
    if (cfg.optimizer != "sgd-momentum") {
        throw ConfigError(fmt::format("pretrain: unknown optimizer '{}'", cfg.optimizer));
    }
    if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) throw ConfigError("pretrain: momentum outside [0,1)");
    if (cfg.temperature <= 0.0) throw ConfigError("pretrain: temperature must be > 0");
    if (cfg.image_size < 32) throw ConfigError("pretrain: imageSize must be >= 32");
    validate(cfg.augment);
}

void validate(const FinetuneConfig& cfg) {
    if (cfg.batch_size < 1) throw ConfigError("finetune: batchSize must be >= 1");
    if (cfg.learning_rate <= 0.0) throw ConfigError("finetune: learningRate must be > 0");
    if (cfg.max_epochs < 0) throw ConfigError("finetune: maxEpochs must be >= 0");
    if (cfg.early_stopping.metric != "val_loss") {
        throw ConfigError(fmt::format("finetune: unsupported early-stopping metric '{}'",
                                      cfg.early_stopping.metric));
    }
    if (cfg.early_stopping.patience < 1) throw ConfigError("finetune: patience must be >= 1");
    if (cfg.label_fraction <= 0.0 || cfg.label_fraction > 1.0) {
        throw ConfigError("finetune: labelFraction outside (0,1]");
    }
    if (cfg.validation_fraction <= 0.0 || cfg.validation_fraction >= 1.0) {
        throw ConfigError("finetune: validationFraction outside (0,1)");
    }
    if (cfg.image_size < 32) throw ConfigError("finetune: imageSize must be >= 32");
}

void to_json(nlohmann::json& j, const PretrainConfig& cfg) {
    j = nlohmann::json{{"batchSizePretrain", cfg.batch_size},
                       {"steps", cfg.steps},
                       {"epochs", cfg.epochs},
                       {"learningRate", cfg.learning_rate},
                       {"optimizer", cfg.optimizer},
                       {"momentum", cfg.momentum},
                       {"temperature", cfg.temperature},
                       {"augment", cfg.augment},
                       {"seed", cfg.seed},
                       {"imageSize", cfg.image_size}};
}

void from_json(const nlohmann::json& j, PretrainConfig& cfg) {
    PretrainConfig d;
    cfg.batch_size = j.value("batchSizePretrain", d.batch_size);
    cfg.steps = j.value("steps", d.steps);
    cfg.epochs = j.value("epochs", d.epochs);
    cfg.learning_rate = j.value("learningRate", d.learning_rate);
    cfg.optimizer = j.value("optimizer", d.optimizer);
    cfg.momentum = j.value("momentum", d.momentum);
    cfg.temperature = j.value("temperature", d.temperature);
    if (j.contains("augment")) cfg.augment = j.at("augment").get<augment::AugmentConfig>();
    cfg.seed = j.value("seed", d.seed);
    cfg.image_size = j.value("imageSize", d.image_size);
}

void to_json(nlohmann::json& j, const FinetuneConfig& cfg) {
    j = nlohmann::json{{"batchSize", cfg.batch_size},
                       {"learningRate", cfg.learning_rate},
                       {"maxEpochs", cfg.max_epochs},
                       {"earlyStopping",
                        {{"metric", cfg.early_stopping.metric},
                         {"patience", cfg.early_stopping.patience},
                         {"minDelta", cfg.early_stopping.min_delta}}},
                       {"freezeEncoder", cfg.freeze_encoder},
                       {"labelFraction", cfg.label_fraction},
                       {"seed", cfg.seed},
                       {"validationFraction", cfg.validation_fraction},
                       {"imageSize", cfg.image_size}};
}

void from_json(const nlohmann::json& j, FinetuneConfig& cfg) {
    FinetuneConfig d;
    cfg.batch_size = j.value("batchSize", d.batch_size);
    cfg.learning_rate = j.value("learningRate", d.learning_rate);
    cfg.max_epochs = j.value("maxEpochs", d.max_epochs);
    if (j.contains("earlyStopping")) {
        const auto& e = j.at("earlyStopping");
        cfg.early_stopping.metric = e.value("metric", d.early_stopping.metric);
        cfg.early_stopping.patience = e.value("patience", d.early_stopping.patience);
        cfg.early_stopping.min_delta = e.value("minDelta", d.early_stopping.min_delta);
    }
    cfg.freeze_encoder = j.value("freezeEncoder", d.freeze_encoder);
    cfg.label_fraction = j.value("labelFraction", d.label_fraction);
    cfg.seed = j.value("seed", d.seed);
    cfg.validation_fraction = j.value("validationFraction", d.validation_fraction);
    cfg.image_size = j.value("imageSize", d.image_size);
}

SampleStore::SampleStore(std::vector<data::RawSample> items, int image_size)
    : items_(std::move(items)), image_size_(image_size) {
    // ~256 MB of decoded float pixels
    const int64_t budget_pixels = int64_t{1} << 26;
    const int64_t total = static_cast<int64_t>(items_.size()) * image_size * image_size;
    preload_ = total <= budget_pixels;
    if (preload_) cache_.resize(items_.size());
}

std::shared_ptr<const data::Sample> SampleStore::get(size_t idx) {
    MSEG_CHECK(idx < items_.size(), "sample index {} out of range {}", idx, items_.size());
    if (preload_) {
        if (!cache_[idx]) {
            cache_[idx] =
                std::make_shared<const data::Sample>(data::load_sample(items_[idx], image_size_));
        }
        return cache_[idx];
    }
    return std::make_shared<const data::Sample>(data::load_sample(items_[idx], image_size_));
}

namespace {

std::vector<nn::Param*> optimizer_params(model::SegModel& m, bool freeze_encoder) {
    std::vector<nn::Param*> params;
    for (nn::Param* p : m.parameters()) {
        if (freeze_encoder && p->name.rfind("encoder.", 0) == 0) continue;
        params.push_back(p);
    }
    return params;
}

void zero_all_grads(model::SegModel& m) {
    for (nn::Param* p : m.parameters()) {
        if (!p->grad.empty()) p->grad.zero();
    }
}

}  // namespace

PretrainResult pretrain(const data::DatasetManifest& manifest, model::SegModel& m,
                        const PretrainConfig& cfg, nlohmann::json provenance) {
    validate(cfg);
    if (manifest.items.empty()) throw DataError("pretrain: empty manifest");
    const size_t n = manifest.items.size();
    if (cfg.steps > 0 && n < 2) throw DataError("pretrain: step mode needs >= 2 images");

    SampleStore store(manifest.items, cfg.image_size);
    augment::AugmentConfig aug = cfg.augment;
    aug.output_size = cfg.image_size;

    nn::SGDMomentum opt(optimizer_params(m, false), static_cast<float>(cfg.learning_rate),
                        static_cast<float>(cfg.momentum));
    PretrainResult result;

    Rng shuffle_rng(derive_seed(cfg.seed, 0xA001));
    std::vector<size_t> pool(n);
    for (size_t i = 0; i < n; ++i) pool[i] = i;
    shuffle_rng.shuffle(pool);
    size_t pos = 0;

    const int64_t total_steps =
        cfg.steps > 0
            ? cfg.steps
            : static_cast<int64_t>(cfg.epochs) * static_cast<int64_t>((n + cfg.batch_size - 1) / cfg.batch_size);

    const int S = cfg.image_size;
    for (int64_t step = 0; step < total_steps; ++step) {
        std::vector<size_t> batch;
        while (batch.size() < static_cast<size_t>(cfg.batch_size)) {
            if (pos == n) {
                shuffle_rng.shuffle(pool);
                pos = 0;
                if (cfg.steps == 0) break;  // epoch mode: keep trailing partial batch
            }
            batch.push_back(pool[pos++]);
        }
        if (batch.size() < 2) {
            result.warnings.push_back(
                fmt::format("step {}: batch of {} images skipped", step, batch.size()));
            continue;
        }
        const int N = static_cast<int>(batch.size());
        Tensor views({2 * N, S, S, 3});
        std::vector<int> pairing(static_cast<size_t>(2 * N));
        for (int i = 0; i < N; ++i) {
            auto sample = store.get(batch[static_cast<size_t>(i)]);
            auto [a, b] = augment::augment_pair(sample->image, aug,
                                                derive_seed(cfg.seed, 0xA002, step, i));
            const int64_t plane = static_cast<int64_t>(S) * S * 3;
            std::copy(a.data(), a.data() + plane, views.data() + (2 * i) * plane);
            std::copy(b.data(), b.data() + plane, views.data() + (2 * i + 1) * plane);
            pairing[static_cast<size_t>(2 * i)] = 2 * i + 1;
            pairing[static_cast<size_t>(2 * i + 1)] = 2 * i;
        }

        zero_all_grads(m);
        Tensor features = m.encode(views, true);
        Tensor embeddings = m.project(features, true);
        losses::EmbeddingBatch eb{std::move(embeddings), std::move(pairing), N};
        Tensor d_embeddings;
        const double loss = losses::nt_xent(eb, {cfg.temperature}, &d_embeddings);
        m.backward_contrastive(d_embeddings);
        opt.step();
        result.step_losses.push_back(loss);
    }

    provenance["stage"] = "pretrain";
    provenance["steps"] = result.step_losses.size();
    if (!result.step_losses.empty()) provenance["finalLoss"] = result.step_losses.back();
    provenance["taxonomy"] = data::taxonomy_json();
    result.checkpoint = snapshot_model(m, std::move(provenance));
    return result;
}

int early_stop_epoch(const std::vector<double>& val_losses, int patience, double min_delta) {
    double best = std::numeric_limits<double>::infinity();
    int bad = 0;
    for (size_t e = 0; e < val_losses.size(); ++e) {
        if (val_losses[e] < best - min_delta) {
            best = val_losses[e];
            bad = 0;
        } else if (++bad == patience) {
            return static_cast<int>(e) + 1;
        }
    }
    return 0;
}

namespace {

struct Batch {
    Tensor images;
    std::vector<uint8_t> labels;
    bool has_labeled_pixel = false;
};

Batch assemble(SampleStore& store, const std::vector<size_t>& indices, size_t begin, size_t end,
               int S) {
    const int B = static_cast<int>(end - begin);
    Batch batch;
    batch.images = Tensor({B, S, S, 3});
    batch.labels.resize(static_cast<size_t>(B) * S * S);
    const int64_t plane = static_cast<int64_t>(S) * S * 3;
    for (int i = 0; i < B; ++i) {
        auto sample = store.get(indices[begin + static_cast<size_t>(i)]);
        std::copy(sample->image.data(), sample->image.data() + plane,
                  batch.images.data() + i * plane);
        std::copy(sample->labels.begin(), sample->labels.end(),
                  batch.labels.begin() + static_cast<int64_t>(i) * S * S);
    }
    for (uint8_t v : batch.labels) {
        if (v != data::kNullLabel) {
            batch.has_labeled_pixel = true;
            break;
        }
    }
    return batch;
}

}  // namespace

FinetuneResult finetune(const data::DatasetManifest& labeled, model::SegModel& m,
                        const FinetuneConfig& cfg, nlohmann::json provenance) {
    validate(cfg);
    data::DatasetManifest usable;
    usable.split = labeled.split;
    for (const auto& item : labeled.items) {
        if (item.label_path) usable.items.push_back(item);
    }
    if (usable.items.empty()) throw DataError("finetune: manifest has no labeled items");

    const data::DatasetManifest selected =
        data::subset(usable, {cfg.label_fraction, cfg.seed});
    const size_t n = selected.items.size();
    size_t val_count = std::max<size_t>(
        1, static_cast<size_t>(std::floor(cfg.validation_fraction * static_cast<double>(n) + 0.5)));
    size_t train_count = n - val_count;

    FinetuneResult result;
    std::vector<data::RawSample> train_items, val_items;
    if (train_count == 0) {
        result.warnings.push_back("subset too small; validating on the training item");
        train_items = selected.items;
        val_items = selected.items;
        train_count = n;
    } else {
        train_items.assign(selected.items.begin(),
                           selected.items.begin() + static_cast<int64_t>(train_count));
        val_items.assign(selected.items.begin() + static_cast<int64_t>(train_count),
                         selected.items.end());
    }

    const int S = cfg.image_size;
    SampleStore train_store(train_items, S);
    SampleStore val_store(val_items, S);
    losses::SegLossConfig loss_cfg;
    loss_cfg.num_classes = m.atrous_config().num_classes;

    nn::SGDMomentum opt(optimizer_params(m, cfg.freeze_encoder),
                        static_cast<float>(cfg.learning_rate), 0.9f);

    auto validate_pass = [&](double& val_loss, double& val_acc) {
        double total_loss = 0.0;
        int64_t loss_batches = 0, correct = 0, counted = 0;
        std::vector<size_t> idx(val_store.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        for (size_t b = 0; b < idx.size(); b += static_cast<size_t>(cfg.batch_size)) {
            const size_t e = std::min(idx.size(), b + static_cast<size_t>(cfg.batch_size));
            Batch batch = assemble(val_store, idx, b, e, S);
            if (!batch.has_labeled_pixel) continue;
            Tensor logits = m.segment(m.encode(batch.images, false), false);
            total_loss += losses::masked_cross_entropy(logits, batch.labels, loss_cfg);
            ++loss_batches;
            const int C = loss_cfg.num_classes;
            const int64_t pixels = logits.size() / C;
            for (int64_t p = 0; p < pixels; ++p) {
                const uint8_t y = batch.labels[static_cast<size_t>(p)];
                if (y == data::kNullLabel) continue;
                const float* row = logits.data() + p * C;
                int arg = 0;
                for (int c = 1; c < C; ++c) {
                    if (row[c] > row[arg]) arg = c;
                }
                if (arg == y) ++correct;
                ++counted;
            }
        }
        if (loss_batches == 0 || counted == 0) {
            throw DataError("finetune: validation slice has no labeled pixel");
        }
        val_loss = total_loss / static_cast<double>(loss_batches);
        val_acc = static_cast<double>(correct) / static_cast<double>(counted);
    };

    auto snapshot_provenance = [&](int epoch) {
        nlohmann::json p = provenance;
        p["stage"] = "finetune";
        p["epoch"] = epoch;
        p["labeledImages"] = n;
        p["taxonomy"] = data::taxonomy_json();
        nlohmann::json hist = nlohmann::json::array();
        for (const EpochStats& s : result.history) {
            hist.push_back({{"epoch", s.epoch},
                            {"trainLoss", s.train_loss},
                            {"valLoss", s.val_loss},
                            {"valAccuracy", s.val_accuracy}});
        }
        p["history"] = std::move(hist);
        return p;
    };

    if (cfg.max_epochs == 0) {
        result.best = snapshot_model(m, snapshot_provenance(0));
        return result;
    }

    double best_val = std::numeric_limits<double>::infinity();
    int bad_epochs = 0;
    std::vector<size_t> order(train_count);
    for (size_t i = 0; i < train_count; ++i) order[i] = i;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        Rng epoch_rng(derive_seed(cfg.seed, 0xF001, epoch));
        epoch_rng.shuffle(order);
        double train_loss_sum = 0.0;
        int64_t train_batches = 0;
        for (size_t b = 0; b < order.size(); b += static_cast<size_t>(cfg.batch_size)) {
            const size_t e = std::min(order.size(), b + static_cast<size_t>(cfg.batch_size));
            Batch batch = assemble(train_store, order, b, e, S);
            if (!batch.has_labeled_pixel) {
                result.warnings.push_back(
                    fmt::format("epoch {}: degenerate batch at {} skipped", epoch, b));
                continue;
            }
            zero_all_grads(m);
            Tensor logits = m.segment(m.encode(batch.images, true), true);
            Tensor d_logits;
            train_loss_sum +=
                losses::masked_cross_entropy(logits, batch.labels, loss_cfg, &d_logits);
            m.backward_segmentation(d_logits);
            opt.step();
            ++train_batches;
        }
        if (train_batches == 0) throw DataError("finetune: every batch in the epoch is degenerate");

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = train_loss_sum / static_cast<double>(train_batches);
        validate_pass(stats.val_loss, stats.val_accuracy);
        result.history.push_back(stats);
        result.epochs_run = epoch;

        if (stats.val_loss < best_val - cfg.early_stopping.min_delta) {
            best_val = stats.val_loss;
            bad_epochs = 0;
            result.best_epoch = epoch;
            result.best = snapshot_model(m, snapshot_provenance(epoch));
        } else if (++bad_epochs == cfg.early_stopping.patience) {
            break;
        }
    }
    if (result.best_epoch == 0) {
        // no epoch improved on +inf is impossible, but guard regardless
        result.best = snapshot_model(m, snapshot_provenance(result.epochs_run));
        result.best_epoch = result.epochs_run;
    }
    return result;
}

}  // namespace marsseg::train
