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

#include "marsseg/report/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "marsseg/common.hpp"
#include "marsseg/data/taxonomy.hpp"

namespace marsseg::report {

namespace {

constexpr double kWidth = 860.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 250.0;  // room for the legend
constexpr double kTop = 56.0;
constexpr double kBottom = 70.0;

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) { return fmt::format("{:.2f}", v); }

// Short human label for axis ticks.
std::string tick_label(double v) {
    if (v != 0.0 && (std::abs(v) < 1e-3 || std::abs(v) >= 1e5)) return fmt::format("{:.1e}", v);
    std::string s = fmt::format("{:.4f}", v);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s.empty() ? "0" : s;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError(fmt::format("cannot open {} for writing", path.string()));
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw DataError(fmt::format("failed writing {}", path.string()));
}

// Blue ramp from white (0%) to saturated (100%).
std::string heat_color(double percent) {
    const double t = std::clamp(percent / 100.0, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(255.0 - t * (255.0 - 22.0)));
    const int g = static_cast<int>(std::lround(255.0 - t * (255.0 - 96.0)));
    const int b = static_cast<int>(std::lround(255.0 - t * (255.0 - 155.0)));
    return fmt::format("#{:02x}{:02x}{:02x}", r, g, b);
}

}  // namespace

std::string render_line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label, bool log_x,
                             const std::vector<Series>& series,
                             const std::vector<RefLine>& ref_lines, const std::string& run_ref) {
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    bool have_point = false;
    std::set<double> x_values;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            if (log_x && !(x > 0.0))
                throw Error(fmt::format("log-x plot requires positive x, got {}", x));
            if (!have_point) {
                xmin = xmax = x;
                ymin = ymax = y;
                have_point = true;
            } else {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
            x_values.insert(x);
        }
    }
    for (const auto& r : ref_lines) {
        if (!have_point) {
            ymin = ymax = r.y;
            have_point = true;
        } else {
            ymin = std::min(ymin, r.y);
            ymax = std::max(ymax, r.y);
        }
    }
    if (!have_point) throw Error("cannot render an empty plot");
    if (xmax == xmin) {
        xmin -= log_x ? 0.0 : 0.5;
        xmax += log_x ? 0.0 : 0.5;
        if (log_x) {
            xmin *= 0.5;
            xmax *= 2.0;
        }
    }
    const double ypad = (ymax - ymin) * 0.08 + 1e-9;
    ymin -= ypad;
    ymax += ypad;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const auto to_x = [&](double x) {
        const double t = log_x ? (std::log10(x) - std::log10(xmin)) /
                                     (std::log10(xmax) - std::log10(xmin))
                               : (x - xmin) / (xmax - xmin);
        return kLeft + t * plot_w;
    };
    const auto to_y = [&](double y) { return kTop + (1.0 - (y - ymin) / (ymax - ymin)) * plot_h; };

    std::string svg;
    svg += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
        "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\">\n",
        static_cast<int>(kWidth), static_cast<int>(kHeight));
    svg += fmt::format("<!-- run={} -->\n", run_ref);
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += fmt::format(
        "<text x=\"{}\" y=\"28\" font-size=\"18\" text-anchor=\"middle\">{}</text>\n",
        num(kLeft + plot_w / 2), escape_xml(title));

    // Axes.
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n"
        "<line x1=\"{0}\" y1=\"{2}\" x2=\"{3}\" y2=\"{2}\" stroke=\"black\"/>\n",
        num(kLeft), num(kTop), num(kTop + plot_h), num(kLeft + plot_w));

    // X ticks at the distinct data x values (the sweep's fraction grid).
    for (double x : x_values) {
        const double px = to_x(x);
        svg += fmt::format(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n"
            "<text x=\"{0}\" y=\"{3}\" font-size=\"12\" text-anchor=\"middle\">{4}</text>\n",
            num(px), num(kTop + plot_h), num(kTop + plot_h + 6), num(kTop + plot_h + 22),
            tick_label(x));
    }
    // Y ticks: 6 even divisions.
    for (int i = 0; i <= 5; ++i) {
        const double y = ymin + (ymax - ymin) * i / 5.0;
        const double py = to_y(y);
        svg += fmt::format(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#dddddd\"/>\n"
            "<text x=\"{3}\" y=\"{4}\" font-size=\"12\" text-anchor=\"end\">{5}</text>\n",
            num(kLeft), num(py), num(kLeft + plot_w), num(kLeft - 8), num(py + 4), tick_label(y));
    }
    svg += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        num(kLeft + plot_w / 2), num(kHeight - 18), escape_xml(x_label));
    svg += fmt::format(
        "<text x=\"20\" y=\"{0}\" font-size=\"14\" text-anchor=\"middle\" "
        "transform=\"rotate(-90 20 {0})\">{1}</text>\n",
        num(kTop + plot_h / 2), escape_xml(y_label));

    // Legend block on the right.
    double legend_y = kTop + 10.0;
    const double legend_x = kLeft + plot_w + 24.0;

    for (const auto& r : ref_lines) {
        const double py = to_y(r.y);
        svg += fmt::format(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" "
            "stroke-dasharray=\"2,4\"/>\n",
            num(kLeft), num(py), num(kLeft + plot_w), r.color);
        svg += fmt::format(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" "
            "stroke-dasharray=\"2,4\"/>\n"
            "<text x=\"{4}\" y=\"{5}\" font-size=\"11\">{6}</text>\n",
            num(legend_x), num(legend_y), num(legend_x + 26), r.color, num(legend_x + 32),
            num(legend_y + 4), escape_xml(r.label));
        legend_y += 18.0;
    }

    for (const auto& s : series) {
        if (s.points.empty()) continue;
        std::string pts;
        for (const auto& [x, y] : s.points)
            pts += fmt::format("{},{} ", num(to_x(x)), num(to_y(y)));
        svg += fmt::format(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\"{} points=\"{}\"/>\n",
            s.color, s.dashed ? " stroke-dasharray=\"6,4\"" : "", pts);
        if (s.markers)
            for (const auto& [x, y] : s.points)
                svg += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"{}\"/>\n",
                                   num(to_x(x)), num(to_y(y)), s.color);
        svg += fmt::format(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" "
            "stroke-width=\"2\"{4}/>\n"
            "<text x=\"{5}\" y=\"{6}\" font-size=\"11\">{7}</text>\n",
            num(legend_x), num(legend_y), num(legend_x + 26), s.color,
            s.dashed ? " stroke-dasharray=\"6,4\"" : "", num(legend_x + 32), num(legend_y + 4),
            escape_xml(s.label));
        legend_y += 18.0;
    }

    svg += "</svg>\n";
    return svg;
}

void write_line_plot(const std::filesystem::path& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label, bool log_x,
                     const std::vector<Series>& series, const std::vector<RefLine>& ref_lines,
                     const std::string& run_ref) {
    write_file(path, render_line_plot(title, x_label, y_label, log_x, series, ref_lines, run_ref));
}

std::string render_confusion_heatmap(const std::string& title, const eval::ConfusionMatrix& cm,
                                     const std::string& run_ref) {
    constexpr int kC = data::kNumClasses;
    const double cell = 72.0;
    const double left = 120.0, top = 90.0;
    const double width = left + kC * cell + 40.0;
    const double height = top + kC * cell + 60.0;

    std::string svg;
    svg += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
        "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\">\n",
        num(width), num(height));
    svg += fmt::format("<!-- run={} -->\n", run_ref);
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += fmt::format(
        "<text x=\"{}\" y=\"30\" font-size=\"17\" text-anchor=\"middle\">{}</text>\n",
        num(left + kC * cell / 2), escape_xml(title));
    svg += fmt::format(
        "<text x=\"{}\" y=\"56\" font-size=\"12\" text-anchor=\"middle\">predicted "
        "class (rows: true class, row-normalized %)</text>\n",
        num(left + kC * cell / 2));

    const auto& names = data::class_names();
    for (int c = 0; c < kC; ++c) {
        svg += fmt::format(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            num(left + c * cell + cell / 2), num(top - 8), escape_xml(std::string(names[c])));
        svg += fmt::format(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
            num(left - 8), num(top + c * cell + cell / 2 + 4), escape_xml(std::string(names[c])));
    }
    for (int t = 0; t < kC; ++t) {
        for (int p = 0; p < kC; ++p) {
            const auto pct = cm.normalized_percent(t, p);
            const std::string fill = pct ? heat_color(*pct) : "#f2f2f2";
            svg += fmt::format(
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" "
                "stroke=\"#bbbbbb\"/>\n",
                num(left + p * cell), num(top + t * cell), num(cell), num(cell), fill);
            const std::string text = pct ? fmt::format("{:.1f}", *pct) : "n/a";
            const std::string color = (pct && *pct > 55.0) ? "white" : "#222222";
            svg += fmt::format(
                "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" "
                "fill=\"{}\">{}</text>\n",
                num(left + p * cell + cell / 2), num(top + t * cell + cell / 2 + 4), color, text);
        }
    }
    svg += "</svg>\n";
    return svg;
}

void write_confusion_heatmap(const std::filesystem::path& path, const std::string& title,
                             const eval::ConfusionMatrix& cm, const std::string& run_ref) {
    write_file(path, render_confusion_heatmap(title, cm, run_ref));
}

}  // namespace marsseg::report
