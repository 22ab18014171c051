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

#include "marsseg/report/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "marsseg/common.hpp"
#include "marsseg/model/seg_model.hpp"
#include "marsseg/report/csv.hpp"

namespace marsseg::report {

namespace {

struct Group {
    std::vector<double> accuracies;
    std::vector<double> bigrock;  // defined recalls only
};

// fraction-major, then init mode; both sorted for stable output.
std::map<double, std::map<std::string, Group>> group_records(
    const std::vector<eval::SweepRecord>& records) {
    std::map<double, std::map<std::string, Group>> grouped;
    for (const auto& r : records) {
        Group& g = grouped[r.fraction][r.init_mode];
        g.accuracies.push_back(r.accuracy);
        if (r.recall[data::kBigRock]) g.bigrock.push_back(*r.recall[data::kBigRock]);
    }
    return grouped;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

std::string series_color(const std::string& init_mode) {
    return init_mode == "pretrained" ? "#1f6fb2" : "#d1495b";
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw DataError(fmt::format("cannot open {}", path.string()));
    try {
        return nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(fmt::format("cannot parse {}: {}", path.string(), e.what()));
    }
}

}  // namespace

std::string sweep_summary_table(const std::vector<eval::SweepRecord>& records) {
    const auto grouped = group_records(records);
    std::string md;
    md += "| fraction | init mode | seeds | accuracy mean | accuracy min | accuracy max | "
          "bigRock recall mean |\n";
    md += "|---:|---|---:|---:|---:|---:|---:|\n";
    for (const auto& [fraction, modes] : grouped) {
        for (const auto& [mode, g] : modes) {
            const auto [mn, mx] = std::minmax_element(g.accuracies.begin(), g.accuracies.end());
            const std::string rock =
                g.bigrock.empty() ? "n/a" : fmt::format("{:.4f}", mean(g.bigrock));
            md += fmt::format("| {} | {} | {} | {:.4f} | {:.4f} | {:.4f} | {} |\n", fraction, mode,
                              g.accuracies.size(), mean(g.accuracies), *mn, *mx, rock);
        }
    }
    return md;
}

std::vector<Series> accuracy_series(const std::vector<eval::SweepRecord>& records) {
    const auto grouped = group_records(records);
    std::set<std::string> modes;
    for (const auto& [fraction, by_mode] : grouped)
        for (const auto& [mode, g] : by_mode) modes.insert(mode);

    std::vector<Series> series;
    for (const auto& mode : modes) {
        Series mean_s{fmt::format("{} (mean)", mode), {}, series_color(mode), false, true};
        Series min_s{fmt::format("{} (min)", mode), {}, series_color(mode), true, false};
        Series max_s{fmt::format("{} (max)", mode), {}, series_color(mode), true, false};
        for (const auto& [fraction, by_mode] : grouped) {
            const auto it = by_mode.find(mode);
            if (it == by_mode.end()) continue;
            const auto& acc = it->second.accuracies;
            const auto [mn, mx] = std::minmax_element(acc.begin(), acc.end());
            mean_s.points.emplace_back(fraction, 100.0 * mean(acc));
            min_s.points.emplace_back(fraction, 100.0 * *mn);
            max_s.points.emplace_back(fraction, 100.0 * *mx);
        }
        series.push_back(std::move(mean_s));
        series.push_back(std::move(min_s));
        series.push_back(std::move(max_s));
    }
    return series;
}

std::vector<RefLine> reference_lines() {
    std::vector<RefLine> lines;
    for (const auto& ref : eval::kReferenceAccuracies)
        lines.push_back({ref.label, ref.accuracy_percent, "#999999"});
    return lines;
}

std::vector<Series> bigrock_recall_series(const std::vector<eval::SweepRecord>& records) {
    const auto grouped = group_records(records);
    std::set<std::string> modes;
    for (const auto& [fraction, by_mode] : grouped)
        for (const auto& [mode, g] : by_mode) modes.insert(mode);

    std::vector<Series> series;
    for (const auto& mode : modes) {
        Series s{fmt::format("{} (mean)", mode), {}, series_color(mode), false, true};
        for (const auto& [fraction, by_mode] : grouped) {
            const auto it = by_mode.find(mode);
            if (it == by_mode.end() || it->second.bigrock.empty()) continue;
            s.points.emplace_back(fraction, 100.0 * mean(it->second.bigrock));
        }
        if (!s.points.empty()) series.push_back(std::move(s));
    }
    return series;
}

ParamAccounting parameter_accounting(const model::EncoderConfig& enc,
                                     const model::ProjectionConfig& proj,
                                     const model::AtrousConfig& atrous, int64_t reference_total) {
    model::SegModel m(enc, proj, atrous, /*seed=*/0);

    // Group parameters by architectural component, in construction order.
    std::vector<std::pair<std::string, int64_t>> groups;
    groups.emplace_back("encoder.stem", 0);
    for (size_t s = 0; s < enc.stage_block_counts.size(); ++s)
        groups.emplace_back(fmt::format("encoder.stage{}", s + 1), 0);
    groups.emplace_back("projection", 0);
    groups.emplace_back("head", 0);

    ParamAccounting acc;
    for (nn::Param* p : m.parameters()) {
        const int64_t n = p->value.size();
        acc.total += n;
        for (auto& [prefix, count] : groups) {
            if (p->name.rfind(prefix + ".", 0) == 0) {
                count += n;
                break;
            }
        }
    }
    acc.groups = groups;

    std::string md;
    md += "| component | parameters |\n|---|---:|\n";
    for (const auto& [name, count] : groups) md += fmt::format("| {} | {} |\n", name, count);
    md += fmt::format("| **total** | **{}** |\n", acc.total);
    if (reference_total > 0) {
        const int64_t delta = acc.total - reference_total;
        md += fmt::format(
            "\nDocumented reference total: {}. This build: {} ({}{} parameters, {:+.3f}%).\n",
            reference_total, acc.total, delta >= 0 ? "+" : "", delta,
            100.0 * static_cast<double>(delta) / static_cast<double>(reference_total));
    }
    acc.markdown = std::move(md);
    return acc;
}

model::EncoderConfig reference_encoder_config() {
    model::EncoderConfig enc;
    enc.stage_block_counts = {3, 4, 6, 3};
    enc.width_multiplier = 2.0;
    enc.use_selective_kernels = true;
    enc.input_channels = 3;
    return enc;
}

model::ProjectionConfig reference_projection_config() { return model::ProjectionConfig{}; }

model::AtrousConfig reference_atrous_config() {
    model::AtrousConfig atrous;
    atrous.output_h = 512;
    atrous.output_w = 512;
    return atrous;
}

ReportResult build_report(const std::vector<std::filesystem::path>& run_dirs,
                          const std::filesystem::path& out_dir, const std::string& run_ref,
                          bool include_param_accounting) {
    if (run_dirs.empty()) throw ConfigError("report requires at least one run directory");

    ReportResult result;
    nlohmann::json taxonomy;
    std::vector<eval::SweepRecord> records;
    std::vector<std::string> run_names;

    for (const auto& dir : run_dirs) {
        const auto manifest_path = dir / "run_manifest.json";
        const nlohmann::json manifest = read_json_file(manifest_path);
        if (!manifest.contains("taxonomy"))
            throw DataError(fmt::format("{} lacks a taxonomy record", manifest_path.string()));
        if (taxonomy.is_null()) {
            taxonomy = manifest.at("taxonomy");
        } else if (taxonomy != manifest.at("taxonomy")) {
            throw DataError(fmt::format("incompatible taxonomy in {} (class sets differ)",
                                        manifest_path.string()));
        }
        run_names.push_back(dir.filename().string());

        const auto sweep_path = dir / "sweep.csv";
        if (std::filesystem::exists(sweep_path)) {
            const auto parsed = parse_sweep_rows(read_csv(sweep_path));
            records.insert(records.end(), parsed.begin(), parsed.end());
        } else {
            result.warnings.push_back(
                fmt::format("{} has no sweep.csv; skipped in tables", dir.string()));
        }
    }
    if (records.empty()) throw DataError("no sweep records found in the given run directories");

    std::filesystem::create_directories(out_dir);

    std::string md;
    md += "# Label-fraction comparison\n\n";
    md += fmt::format("Merged runs: {}\n\n", fmt::join(run_names, ", "));
    md += sweep_summary_table(records);
    md += "\nFull-scale reference accuracies (documented, not reproduced at this scale): ";
    bool first = true;
    for (const auto& ref : eval::kReferenceAccuracies) {
        if (!first) md += ", ";
        md += fmt::format("{} = {}%", ref.label, ref.accuracy_percent);
        first = false;
    }
    md += ".\n";

    std::set<std::string> modes;
    for (const auto& r : records) modes.insert(r.init_mode);
    if (modes.size() >= 2) {
        const auto acc_path = out_dir / "accuracy_vs_fraction.svg";
        write_line_plot(acc_path, "Test accuracy vs label fraction", "label fraction",
                        "accuracy (%)", /*log_x=*/true, accuracy_series(records),
                        reference_lines(), run_ref);
        result.outputs.push_back(acc_path);
        const auto rock_series = bigrock_recall_series(records);
        if (!rock_series.empty()) {
            const auto rock_path = out_dir / "bigrock_recall_vs_fraction.svg";
            write_line_plot(rock_path, "bigRock recall vs label fraction", "label fraction",
                            "recall (%)", /*log_x=*/true, rock_series, {}, run_ref);
            result.outputs.push_back(rock_path);
        }
        md += "\nPlots: accuracy_vs_fraction.svg";
        if (!rock_series.empty()) md += ", bigrock_recall_vs_fraction.svg";
        md += "\n";
    } else {
        md += "\nSingle init mode present; comparison plots omitted.\n";
    }

    if (include_param_accounting) {
        const auto acc =
            parameter_accounting(reference_encoder_config(), reference_projection_config(),
                                 reference_atrous_config(), kReferenceParamTotal);
        md += "\n## Parameter accounting (full-scale configuration)\n\n";
        md += acc.markdown;
    }

    const auto md_path = out_dir / "report.md";
    std::ofstream f(md_path, std::ios::binary);
    if (!f) throw DataError(fmt::format("cannot open {} for writing", md_path.string()));
    f << fmt::format("<!-- run={} -->\n\n", run_ref) << md;
    f.close();
    result.outputs.push_back(md_path);
    result.markdown = std::move(md);
    return result;
}

}  // namespace marsseg::report
