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

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "marsseg/augment/augment.hpp"
#include "marsseg/data/manifest.hpp"
#include "marsseg/data/preprocess.hpp"
#include "marsseg/train/checkpoint.hpp"

namespace marsseg::train {

struct PretrainConfig {
    int batch_size = 16;  // images per step; each contributes two views
    int steps = 0;        // when > 0, a step budget over reshuffled batches
    int epochs = 1;       // otherwise full passes over the corpus
    double learning_rate = 0.03;
    std::string optimizer = "sgd-momentum";
    double momentum = 0.9;
    double temperature = 0.1;
    augment::AugmentConfig augment;
    uint64_t seed = 0;
    int image_size = 512;
};

struct EarlyStopping {
    std::string metric = "val_loss";
    int patience = 5;
    double min_delta = 0.0;
};

struct FinetuneConfig {
    int batch_size = 8;
    double learning_rate = 0.057;
    int max_epochs = 50;
    EarlyStopping early_stopping;
    bool freeze_encoder = false;
    double label_fraction = 1.0;
    uint64_t seed = 0;
    double validation_fraction = 0.1;
    int image_size = 512;
};

void validate(const PretrainConfig& cfg);
void validate(const FinetuneConfig& cfg);
void to_json(nlohmann::json& j, const PretrainConfig& cfg);
void from_json(const nlohmann::json& j, PretrainConfig& cfg);
void to_json(nlohmann::json& j, const FinetuneConfig& cfg);
void from_json(const nlohmann::json& j, FinetuneConfig& cfg);

// Preloads decoded samples when they fit a fixed memory budget, otherwise
// re-reads per access. Pure per-item loading either way.
class SampleStore {
  public:
    SampleStore(std::vector<data::RawSample> items, int image_size);
    std::shared_ptr<const data::Sample> get(size_t idx);
    size_t size() const { return items_.size(); }
    const data::RawSample& item(size_t idx) const { return items_[idx]; }

  private:
    std::vector<data::RawSample> items_;
    int image_size_;
    bool preload_;
    std::vector<std::shared_ptr<const data::Sample>> cache_;
};

struct PretrainResult {
    Checkpoint checkpoint;
    std::vector<double> step_losses;
    std::vector<std::string> warnings;
};

// augment_pair -> encoder -> projection -> nt_xent -> SGD step per batch.
PretrainResult pretrain(const data::DatasetManifest& manifest, model::SegModel& m,
                        const PretrainConfig& cfg, nlohmann::json provenance);

struct EpochStats {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
};

struct FinetuneResult {
    Checkpoint best;  // best-validation snapshot
    std::vector<EpochStats> history;
    int best_epoch = 0;  // 1-based; 0 when no epoch ran
    int epochs_run = 0;
    std::vector<std::string> warnings;
};

// Applies the label fraction via the subset protocol, holds out a seeded
// validation slice, trains under masked cross-entropy with early stopping on
// validation loss, and returns the best-validation snapshot.
FinetuneResult finetune(const data::DatasetManifest& labeled, model::SegModel& m,
                        const FinetuneConfig& cfg, nlohmann::json provenance);

// Decide when early stopping fires: returns the 1-based epoch after which
// training stops given the validation-loss sequence, or 0 if it never fires.
int early_stop_epoch(const std::vector<double>& val_losses, int patience, double min_delta);

}  // namespace marsseg::train
