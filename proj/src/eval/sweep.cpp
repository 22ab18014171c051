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

#include "marsseg/eval/sweep.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "marsseg/common.hpp"
#include "marsseg/rng.hpp"
#include "marsseg/train/checkpoint.hpp"

namespace marsseg::eval {

namespace {

bool record_matches(const SweepRecord& r, double fraction, uint64_t seed,
                    const std::string& init_mode) {
    return r.fraction == fraction && r.seed == seed && r.init_mode == init_mode;
}

}  // namespace

void validate(const SweepConfig& cfg) {
    if (cfg.fractions.empty()) throw ConfigError("sweep.fractions must be nonempty");
    for (double f : cfg.fractions)
        if (!(f > 0.0) || f > 1.0)
            throw ConfigError(fmt::format("sweep.fractions entries must lie in (0,1], got {}", f));
    if (cfg.seeds.empty()) throw ConfigError("sweep.seeds must be nonempty");
    if (cfg.init_modes.empty()) throw ConfigError("sweep.initModes must be nonempty");
    for (const auto& mode : cfg.init_modes)
        if (mode != "pretrained" && mode != "random")
            throw ConfigError(
                fmt::format("sweep.initModes entries must be pretrained|random, got '{}'", mode));
}

void to_json(nlohmann::json& j, const SweepConfig& cfg) {
    j = nlohmann::json{{"fractions", cfg.fractions},
                       {"seeds", cfg.seeds},
                       {"initModes", cfg.init_modes}};
}

void from_json(const nlohmann::json& j, SweepConfig& cfg) {
    if (j.contains("fractions")) j.at("fractions").get_to(cfg.fractions);
    if (j.contains("seeds")) j.at("seeds").get_to(cfg.seeds);
    if (j.contains("initModes")) j.at("initModes").get_to(cfg.init_modes);
}

SweepOutcome run_sweep(const data::DatasetManifest& train_manifest,
                       const data::DatasetManifest& test_manifest,
                       const model::EncoderConfig& enc, const model::ProjectionConfig& proj,
                       const model::AtrousConfig& atrous, const train::FinetuneConfig& base_cfg,
                       const SweepConfig& sweep_cfg, const train::Checkpoint* pretrained,
                       const std::vector<SweepRecord>& completed,
                       const std::function<void(const SweepRecord&)>& on_record) {
    validate(sweep_cfg);
    validate(base_cfg);
    const bool wants_pretrained =
        std::find(sweep_cfg.init_modes.begin(), sweep_cfg.init_modes.end(), "pretrained") !=
        sweep_cfg.init_modes.end();
    if (wants_pretrained && pretrained == nullptr)
        throw ConfigError("sweep init mode 'pretrained' requires a pretrained checkpoint");

    SweepOutcome outcome;
    outcome.records = completed;

    for (double fraction : sweep_cfg.fractions) {
        for (uint64_t seed : sweep_cfg.seeds) {
            for (const auto& init_mode : sweep_cfg.init_modes) {
                const bool done = std::any_of(
                    completed.begin(), completed.end(),
                    [&](const SweepRecord& r) { return record_matches(r, fraction, seed, init_mode); });
                if (done) continue;
                try {
                    // Both init modes share the build seed: the segmentation
                    // head starts identically and only the transferred
                    // encoder/projection weights differ.
                    auto m = model::build_model(enc, proj, atrous, model::model_build_seed(seed));
                    if (init_mode == "pretrained")
                        train::load_into_model(*pretrained, *m, {"encoder.", "projection."});

                    train::FinetuneConfig cfg = base_cfg;
                    cfg.label_fraction = fraction;
                    cfg.seed = seed;
                    nlohmann::json provenance{{"stage", "sweep"},
                                              {"fraction", fraction},
                                              {"seed", seed},
                                              {"initMode", init_mode}};
                    const train::FinetuneResult ft =
                        train::finetune(train_manifest, *m, cfg, provenance);
                    train::load_into_model(ft.best, *m);

                    const EvalResult ev =
                        evaluate_model(*m, test_manifest, cfg.image_size, cfg.batch_size);

                    SweepRecord rec;
                    rec.fraction = fraction;
                    rec.seed = seed;
                    rec.init_mode = init_mode;
                    rec.accuracy = ev.accuracy;
                    rec.recall = ev.recall;
                    rec.epochs = ft.epochs_run;
                    outcome.records.push_back(rec);
                    ++outcome.executed;
                    if (on_record) on_record(rec);
                } catch (const std::exception& e) {
                    outcome.errors.push_back(fmt::format(
                        "run (fraction={}, seed={}, init={}) failed: {}", fraction, seed,
                        init_mode, e.what()));
                }
            }
        }
    }
    return outcome;
}

}  // namespace marsseg::eval
