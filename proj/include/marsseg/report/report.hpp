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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "marsseg/eval/sweep.hpp"
#include "marsseg/model/config.hpp"
#include "marsseg/report/svg.hpp"

namespace marsseg::report {

// Aggregates sweep records into mean/min/max accuracy per (fraction, init
// mode) and renders the markdown summary table.
std::string sweep_summary_table(const std::vector<eval::SweepRecord>& records);

// Accuracy-vs-fraction series (mean per fraction, one per init mode, with
// min/max companions) plus documented reference lines.
std::vector<Series> accuracy_series(const std::vector<eval::SweepRecord>& records);
std::vector<RefLine> reference_lines();

// Mean bigRock recall per fraction per init mode; fractions where every
// seed's recall is undefined are omitted.
std::vector<Series> bigrock_recall_series(const std::vector<eval::SweepRecord>& records);

// Parameter table for an arbitrary configuration: per-component counts
// (stem, stages, projection, head) and the delta against a documented
// reference total when reference_total > 0.
struct ParamAccounting {
    std::vector<std::pair<std::string, int64_t>> groups;
    int64_t total = 0;
    std::string markdown;
};
ParamAccounting parameter_accounting(const model::EncoderConfig& enc,
                                     const model::ProjectionConfig& proj,
                                     const model::AtrousConfig& atrous,
                                     int64_t reference_total = 0);

// Full-scale configuration used for capacity accounting: stages (3,4,6,3),
// width multiplier 2, selective kernels on, 512x512 six-class head.
model::EncoderConfig reference_encoder_config();
model::ProjectionConfig reference_projection_config();
model::AtrousConfig reference_atrous_config();
inline constexpr int64_t kReferenceParamTotal = 171'172'160;

struct ReportResult {
    std::string markdown;
    std::vector<std::string> warnings;
    std::vector<std::filesystem::path> outputs;
};

// Merges sweep.csv files from completed run directories into a comparison
// table and plots under out_dir. Run manifests must agree on the taxonomy.
ReportResult build_report(const std::vector<std::filesystem::path>& run_dirs,
                          const std::filesystem::path& out_dir, const std::string& run_ref,
                          bool include_param_accounting);

}  // namespace marsseg::report
