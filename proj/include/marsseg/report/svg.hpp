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
#include <string>
#include <utility>
#include <vector>

#include "marsseg/eval/metrics.hpp"

namespace marsseg::report {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (x, y), pre-sorted by x
    std::string color = "#1f6fb2";
    bool dashed = false;
    bool markers = true;
};

// Horizontal reference line (e.g. documented paper-scale accuracies).
struct RefLine {
    std::string label;
    double y = 0.0;
    std::string color = "#999999";
};

// Self-contained line chart. log_x uses a log10 axis (x must be > 0).
// run_ref lands in an SVG comment so the artifact is traceable to its run.
std::string render_line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label, bool log_x,
                             const std::vector<Series>& series,
                             const std::vector<RefLine>& ref_lines, const std::string& run_ref);

void write_line_plot(const std::filesystem::path& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label, bool log_x,
                     const std::vector<Series>& series, const std::vector<RefLine>& ref_lines,
                     const std::string& run_ref);

// Row-normalized confusion heatmap; empty rows render as "n/a".
std::string render_confusion_heatmap(const std::string& title, const eval::ConfusionMatrix& cm,
                                     const std::string& run_ref);

void write_confusion_heatmap(const std::filesystem::path& path, const std::string& title,
                             const eval::ConfusionMatrix& cm, const std::string& run_ref);

}  // namespace marsseg::report
