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

#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "marsseg/common.hpp"
#include "marsseg/data/manifest.hpp"
#include "marsseg/data/subset.hpp"
#include "marsseg/train/trainer.hpp"
#include "oracles.hpp"

using namespace marsseg;
namespace fs = std::filesystem;

namespace {

// One tiny model family shared by all training tests.
std::unique_ptr<model::SegModel> tiny_model(uint64_t seed) {
    model::EncoderConfig enc;
    enc.stage_block_counts = {1, 1};
    enc.width_multiplier = 0.0625;
    enc.sk_reduction = 4;
    enc.sk_min_attention_width = 4;
    model::ProjectionConfig proj;
    proj.layer_count = 2;
    proj.hidden_width = 16;
    proj.output_dim = 8;
    proj.finetune_attach_layer = 1;
    model::AtrousConfig at;
    at.dilation_rates = {1, 2};
    at.filters_per_branch = 8;
    at.output_h = 32;
    at.output_w = 32;
    return model::build_model(enc, proj, at, seed);
}

train::PretrainConfig tiny_pretrain(int steps) {
    train::PretrainConfig cfg;
    cfg.batch_size = 4;
    cfg.steps = steps;
    cfg.learning_rate = 0.05;
    cfg.temperature = 0.5;
    cfg.seed = 3;
    cfg.image_size = 32;
    cfg.augment.output_size = 32;
    return cfg;
}

train::FinetuneConfig tiny_finetune(int epochs) {
    train::FinetuneConfig cfg;
    cfg.batch_size = 4;
    cfg.learning_rate = 0.02;
    cfg.max_epochs = epochs;
    cfg.early_stopping.patience = 3;
    cfg.label_fraction = 1.0;
    cfg.seed = 5;
    cfg.validation_fraction = 0.25;
    cfg.image_size = 32;
    return cfg;
}

std::vector<float> model_params(model::SegModel& m) {
    std::vector<float> out;
    for (auto* p : m.parameters())
        out.insert(out.end(), p->value.storage().begin(), p->value.storage().end());
    return out;
}

data::DatasetManifest train_manifest() {
    return data::load_manifest(testing::small_dataset(), data::Split::train);
}

}  // namespace

TEST_SUITE("train") {

TEST_CASE("early_stop_epoch fires after patience non-improving epochs") {
    // Best at epoch 2 (0.9); epochs 3,4,5 fail to improve -> stop after 5.
    CHECK(train::early_stop_epoch({1.0, 0.9, 0.91, 0.92, 0.93}, 3, 0.0) == 5);
    CHECK(train::early_stop_epoch({1.0, 0.9, 0.91, 0.92}, 3, 0.0) == 0);
    CHECK(train::early_stop_epoch({1.0, 0.9, 0.8, 0.7}, 2, 0.0) == 0);
    CHECK(train::early_stop_epoch({1.0, 0.99, 0.98}, 2, 0.05) == 3);  // < minDelta gains
    CHECK(train::early_stop_epoch({}, 3, 0.0) == 0);
}

TEST_CASE("checkpoint round-trip is bit-exact") {
    auto m = tiny_model(11);
    auto ckpt = train::snapshot_model(*m, {{"note", "t"}});
    const auto dir = testing::fresh_dir("ckpt");
    const auto path = dir / "m.ckpt";
    train::save_checkpoint(ckpt, path);
    const auto back = train::load_checkpoint(path);

    CHECK(back.version == ckpt.version);
    CHECK(back.provenance.at("note") == "t");
    REQUIRE(back.tensors.size() == ckpt.tensors.size());
    for (size_t i = 0; i < back.tensors.size(); ++i) {
        CHECK(back.tensors[i].first == ckpt.tensors[i].first);
        CHECK(back.tensors[i].second.storage() == ckpt.tensors[i].second.storage());
    }

    // Rebuild from the stored architecture; same parameters, same outputs.
    auto rebuilt = train::model_from_checkpoint(back);
    CHECK(model_params(*rebuilt) == model_params(*m));
}

TEST_CASE("corrupted checkpoints are rejected without partial state") {
    auto m = tiny_model(13);
    auto ckpt = train::snapshot_model(*m, {});
    const auto dir = testing::fresh_dir("ckpt_bad");
    const auto path = dir / "m.ckpt";
    train::save_checkpoint(ckpt, path);

    auto mutate = [&](const fs::path& src, const fs::path& dst, int64_t offset, char delta) {
        std::ifstream in(src, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (offset < 0) offset += static_cast<int64_t>(bytes.size());
        bytes[static_cast<size_t>(offset)] =
            static_cast<char>(bytes[static_cast<size_t>(offset)] + delta);
        std::ofstream out(dst, std::ios::binary);
        out << bytes;
    };

    // Broken magic.
    mutate(path, dir / "magic.ckpt", 0, 1);
    CHECK_THROWS_AS(train::load_checkpoint(dir / "magic.ckpt"), DataError);

    // Flipped payload byte fails the integrity hash.
    mutate(path, dir / "payload.ckpt", -5, 1);
    CHECK_THROWS_AS(train::load_checkpoint(dir / "payload.ckpt"), DataError);

    // Truncation.
    {
        std::ifstream in(path, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::ofstream out(dir / "trunc.ckpt", std::ios::binary);
        out << bytes.substr(0, bytes.size() / 2);
    }
    CHECK_THROWS_AS(train::load_checkpoint(dir / "trunc.ckpt"), DataError);

    // A failed load must not have touched the destination model.
    auto fresh = tiny_model(14);
    const auto before = model_params(*fresh);
    CHECK_THROWS_AS(
        [&] {
            auto bad = train::load_checkpoint(dir / "payload.ckpt");
            train::load_into_model(bad, *fresh);
        }(),
        DataError);
    CHECK(model_params(*fresh) == before);
}

TEST_CASE("load_into_model rejects architecture mismatches by tensor name") {
    auto m = tiny_model(15);
    auto ckpt = train::snapshot_model(*m, {});

    model::EncoderConfig wide;
    wide.stage_block_counts = {1, 1};
    wide.width_multiplier = 0.125;  // double width
    wide.sk_reduction = 4;
    wide.sk_min_attention_width = 4;
    model::ProjectionConfig proj;
    proj.layer_count = 2;
    proj.hidden_width = 16;
    proj.output_dim = 8;
    model::AtrousConfig at;
    at.dilation_rates = {1, 2};
    at.filters_per_branch = 8;
    at.output_h = 32;
    at.output_w = 32;
    auto other = model::build_model(wide, proj, at, 16);

    const auto before = model_params(*other);
    try {
        train::load_into_model(ckpt, *other);
        FAIL("expected a mismatch error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("encoder.") != std::string::npos);
    }
    CHECK(model_params(*other) == before);  // all-or-nothing

    // Prefix-restricted load succeeds for compatible components: the heads
    // have identical shapes across the two encoders only if channel counts
    // match, so restrict to the projection layers driven by pooled features.
    auto same = tiny_model(17);
    train::load_into_model(ckpt, *same, {"encoder.", "projection."});
    auto full = train::snapshot_model(*same, {});
    for (size_t i = 0; i < full.tensors.size(); ++i) {
        const auto& name = full.tensors[i].first;
        if (name.rfind("encoder.", 0) == 0 || name.rfind("projection.", 0) == 0) {
            CHECK(full.tensors[i].second.storage() == ckpt.tensors[i].second.storage());
        }
    }
}

TEST_CASE("pretrain with zero steps leaves the model at initialization") {
    auto m = tiny_model(19);
    const auto before = model_params(*m);
    auto cfg = tiny_pretrain(0);
    cfg.epochs = 0;
    const auto result = train::pretrain(train_manifest(), *m, cfg, {});
    CHECK(result.step_losses.empty());
    CHECK(model_params(*m) == before);
}

TEST_CASE("pretrain records stage, steps and taxonomy in provenance") {
    auto m = tiny_model(21);
    const auto result = train::pretrain(train_manifest(), *m, tiny_pretrain(2),
                                        {{"runHash", "abc"}});
    CHECK(result.checkpoint.provenance.at("stage") == "pretrain");
    CHECK(result.checkpoint.provenance.at("steps") == 2);
    CHECK(result.checkpoint.provenance.at("runHash") == "abc");
    CHECK(result.checkpoint.provenance.at("taxonomy").at("nullLabel") == 255);
    CHECK(result.checkpoint.provenance.contains("finalLoss"));
}

TEST_CASE("pretrain descends on average across seeds") {
    // Mean loss over the last steps must beat the first-step loss for most
    // seeds; a small LR on a tiny model makes this stable.
    int improved = 0;
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        auto m = tiny_model(100 + seed);
        auto cfg = tiny_pretrain(40);
        cfg.learning_rate = 0.1;
        cfg.seed = seed;
        const auto result = train::pretrain(train_manifest(), *m, cfg, {});
        REQUIRE(result.step_losses.size() == 40);
        double head = 0, tail = 0;
        for (size_t i = 0; i < 4; ++i) head += result.step_losses[i];
        for (size_t i = 36; i < 40; ++i) tail += result.step_losses[i];
        if (tail < head) ++improved;
    }
    CHECK(improved >= 4);
}

TEST_CASE("pretrain is deterministic for a fixed seed") {
    auto run = [&] {
        auto m = tiny_model(23);
        const auto result = train::pretrain(train_manifest(), *m, tiny_pretrain(4), {});
        return std::make_pair(result.step_losses, model_params(*m));
    };
    const auto a = run();
    const auto b = run();
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
}

TEST_CASE("finetune honours maxEpochs zero by returning the startpoint") {
    auto m = tiny_model(25);
    const auto before = model_params(*m);
    const auto result = train::finetune(train_manifest(), *m, tiny_finetune(0), {});
    CHECK(result.history.empty());
    CHECK(result.epochs_run == 0);
    CHECK(result.best_epoch == 0);
    CHECK(model_params(*m) == before);
    // The snapshot equals initialization.
    auto fresh = tiny_model(25);
    train::load_into_model(result.best, *fresh);
    CHECK(model_params(*fresh) == before);
}

TEST_CASE("finetune tracks history and stops early on plateaus") {
    auto m = tiny_model(27);
    auto cfg = tiny_finetune(4);
    const auto result = train::finetune(train_manifest(), *m, cfg, {});
    REQUIRE(!result.history.empty());
    CHECK(result.epochs_run == static_cast<int>(result.history.size()));
    CHECK(result.best_epoch >= 1);
    CHECK(result.best_epoch <= result.epochs_run);
    for (size_t i = 0; i < result.history.size(); ++i) {
        CHECK(result.history[i].epoch == static_cast<int>(i) + 1);
        CHECK(result.history[i].val_accuracy >= 0.0);
        CHECK(result.history[i].val_accuracy <= 1.0);
        CHECK(result.history[i].train_loss > 0.0);
    }
    // The recorded best epoch minimizes validation loss.
    double best = result.history[static_cast<size_t>(result.best_epoch - 1)].val_loss;
    for (const auto& e : result.history) CHECK(best <= e.val_loss + 1e-12);
}

TEST_CASE("finetune is deterministic for a fixed seed") {
    auto run = [&] {
        auto m = tiny_model(29);
        const auto result = train::finetune(train_manifest(), *m, tiny_finetune(2), {});
        std::vector<double> losses;
        for (const auto& e : result.history) {
            losses.push_back(e.train_loss);
            losses.push_back(e.val_loss);
        }
        return std::make_pair(losses, model_params(*m));
    };
    const auto a = run();
    const auto b = run();
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
}

TEST_CASE("finetune applies the label fraction through the subset protocol") {
    auto m = tiny_model(31);
    auto cfg = tiny_finetune(1);
    cfg.label_fraction = 0.25;
    const auto manifest = train_manifest();
    const auto result = train::finetune(manifest, *m, cfg, {});
    // Provenance must record the actual labeled subset size.
    const int64_t expected = data::subset_size(0.25, manifest.labeled_count());
    CHECK(result.best.provenance.at("labeledImages") == expected);
}

TEST_CASE("config validation rejects nonsense") {
    train::PretrainConfig p;
    p.batch_size = 1;  // a contrastive batch needs at least two images
    CHECK_THROWS_AS(train::validate(p), ConfigError);
    p = {};
    p.temperature = 0.0;
    CHECK_THROWS_AS(train::validate(p), ConfigError);
    p = {};
    p.learning_rate = 0.0;
    CHECK_THROWS_AS(train::validate(p), ConfigError);
    p = {};
    p.optimizer = "adam";
    CHECK_THROWS_AS(train::validate(p), ConfigError);

    train::FinetuneConfig f;
    f.label_fraction = 0.0;
    CHECK_THROWS_AS(train::validate(f), ConfigError);
    f = {};
    f.validation_fraction = 1.0;
    CHECK_THROWS_AS(train::validate(f), ConfigError);
    f = {};
    f.early_stopping.patience = -1;
    CHECK_THROWS_AS(train::validate(f), ConfigError);
}

}  // TEST_SUITE
