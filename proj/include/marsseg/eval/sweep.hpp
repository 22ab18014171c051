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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "marsseg/data/manifest.hpp"
#include "marsseg/data/taxonomy.hpp"
#include "marsseg/eval/evaluate.hpp"
#include "marsseg/train/trainer.hpp"

namespace marsseg::eval {

// Paper-scale accuracies carried as documented reference lines on plots,
// never reproduced at desk scale.
struct ReferencePoint {
    const char* label;
    double accuracy_percent;
};
inline constexpr std::array<ReferencePoint, 4> kReferenceAccuracies{{
    {"pretrained @ 1% (reference)", 91.1},
    {"supervised @ 1% (reference)", 81.9},
    {"pretrained @ 100% (reference)", 97.4},
    {"supervised @ 100% (reference)", 95.3},
}};

struct SweepConfig {
    std::vector<double> fractions{0.05, 0.5, 1.0};
    std::vector<uint64_t> seeds{1, 2, 3, 4, 5};
    std::vector<std::string> init_modes{"pretrained", "random"};
};

void validate(const SweepConfig& cfg);
void to_json(nlohmann::json& j, const SweepConfig& cfg);
void from_json(const nlohmann::json& j, SweepConfig& cfg);

// One completed (fraction, seed, initMode) run.
struct SweepRecord {
    double fraction = 1.0;
    uint64_t seed = 0;
    std::string init_mode;
    double accuracy = 0.0;
    std::array<std::optional<double>, data::kNumClasses> recall;
    int epochs = 0;  // epochs run until convergence or the cap
};

struct SweepOutcome {
    std::vector<SweepRecord> records;  // completed, including resumed ones
    std::vector<std::string> errors;   // failed runs (sweep continued)
    int executed = 0;                  // runs trained here (not resumed)
};

// Grid order: fraction-major, then seed, then init mode. `completed` records
// (e.g. parsed from a partial sweep.csv) are kept and their runs skipped;
// on_record fires once per newly executed run, in grid order. A run failure
// is recorded in `errors` and the sweep continues. The pretrained checkpoint
// supplies encoder+projection weights; the head always keeps the per-seed
// initialization so init modes differ only in the transferred weights.
SweepOutcome run_sweep(const data::DatasetManifest& train_manifest,
                       const data::DatasetManifest& test_manifest,
                       const model::EncoderConfig& enc, const model::ProjectionConfig& proj,
                       const model::AtrousConfig& atrous, const train::FinetuneConfig& base_cfg,
                       const SweepConfig& sweep_cfg, const train::Checkpoint* pretrained,
                       const std::vector<SweepRecord>& completed = {},
                       const std::function<void(const SweepRecord&)>& on_record = {});

}  // namespace marsseg::eval
