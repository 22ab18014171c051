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
#include <nlohmann/json.hpp>

#include "marsseg/common.hpp"
#include "marsseg/report/csv.hpp"
#include "marsseg/report/report.hpp"
#include "marsseg/report/svg.hpp"
#include "oracles.hpp"

using namespace marsseg;
namespace fs = std::filesystem;

namespace {

eval::SweepRecord make_record(double fraction, uint64_t seed, const std::string& mode,
                              double accuracy) {
    eval::SweepRecord rec;
    rec.fraction = fraction;
    rec.seed = seed;
    rec.init_mode = mode;
    rec.accuracy = accuracy;
    for (size_t c = 0; c < 6; ++c) rec.recall[c] = 0.1 * static_cast<double>(c) + accuracy / 2;
    rec.recall[4] = std::nullopt;  // one undefined class
    rec.epochs = 3;
    return rec;
}

// Minimal completed run directory: run_manifest.json + sweep.csv.
fs::path fake_run_dir(const fs::path& base, const std::string& name,
                      const std::vector<eval::SweepRecord>& records,
                      const nlohmann::json& taxonomy) {
    const fs::path dir = base / name;
    fs::create_directories(dir);
    nlohmann::json manifest{{"command", "sweep"},
                            {"seed", 1},
                            {"hash", "cafe0123"},
                            {"taxonomy", taxonomy},
                            {"config", nlohmann::json::object()}};
    std::ofstream(dir / "run_manifest.json") << manifest.dump(2);

    report::Csv csv;
    csv.comments = {"run=cafe0123"};
    csv.header = report::sweep_csv_header();
    for (const auto& rec : records) csv.rows.push_back(report::sweep_record_row(rec));
    report::write_csv(dir / "sweep.csv", csv);
    return dir;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("csv formatting, quoting and parsing round-trip") {
    report::Csv csv;
    csv.comments = {"run=abc123", "note=x"};
    csv.header = {"a", "b", "c"};
    csv.rows = {{"1", "plain", "0.5"},
                {"2", "with,comma", "quote\"inside"},
                {"3", "multi\nline", ""}};
    const std::string text = report::format_csv(csv);
    CHECK(text.find("# run=abc123") == 0);
    CHECK(text.find("\"with,comma\"") != std::string::npos);
    CHECK(text.find("\"quote\"\"inside\"") != std::string::npos);

    const auto back = report::parse_csv(text);
    CHECK(back.comments == csv.comments);
    CHECK(back.header == csv.header);
    REQUIRE(back.rows == csv.rows);

    const auto dir = testing::fresh_dir("csv");
    report::write_csv(dir / "t.csv", csv);
    CHECK(report::read_csv(dir / "t.csv").rows == csv.rows);

    report::append_csv_row(dir / "t.csv", {"4", "appended", "9"});
    const auto appended = report::read_csv(dir / "t.csv");
    REQUIRE(appended.rows.size() == 4);
    CHECK(appended.rows[3][1] == "appended");
}

TEST_CASE("format_number emits shortest round-trip decimals") {
    CHECK(report::format_number(0.05) == "0.05");
    CHECK(report::format_number(1.0) == "1");
    CHECK(report::format_number(0.1 + 0.2) == "0.30000000000000004");
    const double v = 0.9219384193;
    CHECK(std::stod(report::format_number(v)) == v);
}

TEST_CASE("sweep rows round-trip through csv including n/a recalls") {
    const auto rec = make_record(0.05, 3, "pretrained", 0.71);
    report::Csv csv;
    csv.header = report::sweep_csv_header();
    csv.rows.push_back(report::sweep_record_row(rec));
    const auto parsed = report::parse_sweep_rows(csv);
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].fraction == rec.fraction);
    CHECK(parsed[0].seed == rec.seed);
    CHECK(parsed[0].init_mode == rec.init_mode);
    CHECK(parsed[0].accuracy == rec.accuracy);
    CHECK(parsed[0].epochs == rec.epochs);
    CHECK(!parsed[0].recall[4].has_value());
    CHECK(parsed[0].recall[0].value() == rec.recall[0].value());

    // Wrong header is rejected outright.
    report::Csv bad = csv;
    bad.header[0] = "Fraction";
    CHECK_THROWS_AS(report::parse_sweep_rows(bad), DataError);
}

TEST_CASE("line plots carry the run reference and all series labels") {
    std::vector<report::Series> series{{"mean (pretrained)", {{0.05, 60.0}, {1.0, 80.0}}},
                                       {"mean (random)", {{0.05, 50.0}, {1.0, 78.0}}}};
    series[1].dashed = true;
    const auto svg = report::render_line_plot("accuracy vs fraction", "label fraction",
                                              "accuracy (%)", true, series,
                                              report::reference_lines(), "beef1234");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<!-- run=beef1234 -->") != std::string::npos);
    CHECK(svg.find("mean (pretrained)") != std::string::npos);
    CHECK(svg.find("reference") != std::string::npos);

    CHECK_THROWS_AS(report::render_line_plot("t", "x", "y", true,
                                             {{"s", {{0.0, 1.0}}}}, {}, "r"),
                    Error);  // log axis needs positive x
    CHECK_THROWS_AS(report::render_line_plot("t", "x", "y", false, {}, {}, "r"), Error);
}

TEST_CASE("confusion heatmap renders counts and n/a rows") {
    eval::ConfusionMatrix cm;
    cm.counts[0][0] = 10;
    cm.counts[0][1] = 2;
    cm.counts[2][2] = 5;
    const auto svg = report::render_confusion_heatmap("test confusion", cm, "feed5678");
    CHECK(svg.find("<!-- run=feed5678 -->") != std::string::npos);
    CHECK(svg.find("n/a") != std::string::npos);       // empty rows
    CHECK(svg.find("83.3") != std::string::npos);      // 10/12 normalized
    CHECK(svg.find("soil") != std::string::npos);
    CHECK(svg.find("bigRock") != std::string::npos);
}

TEST_CASE("sweep summary aggregates by fraction and mode") {
    std::vector<eval::SweepRecord> records;
    for (uint64_t seed : {1, 2, 3}) {
        records.push_back(make_record(0.05, seed, "pretrained",
                                      0.60 + 0.01 * static_cast<double>(seed)));
        records.push_back(make_record(0.05, seed, "random",
                                      0.50 + 0.01 * static_cast<double>(seed)));
    }
    const auto table = report::sweep_summary_table(records);
    CHECK(table.find("| 0.05") != std::string::npos);
    CHECK(table.find("pretrained") != std::string::npos);
    CHECK(table.find("random") != std::string::npos);
    // Mean of 0.61,0.62,0.63 in the table's raw-fraction formatting.
    CHECK(table.find("0.6200") != std::string::npos);

    const auto series = report::accuracy_series(records);
    // Mean + min/max band per mode.
    CHECK(series.size() == 6);
    double mean_y = 0;
    for (const auto& s : series) {
        if (s.label.find("pretrained") != std::string::npos &&
            s.label.find("mean") != std::string::npos) {
            REQUIRE(s.points.size() == 1);
            mean_y = s.points[0].second;
        }
    }
    CHECK(mean_y == doctest::Approx(62.0));

    const auto big = report::bigrock_recall_series(records);
    CHECK(!big.empty());
}

TEST_CASE("parameter accounting matches the model and groups by component") {
    model::EncoderConfig enc;
    enc.stage_block_counts = {1, 1};
    enc.width_multiplier = 0.0625;
    enc.sk_reduction = 4;
    enc.sk_min_attention_width = 4;
    model::ProjectionConfig proj;
    proj.layer_count = 2;
    proj.hidden_width = 16;
    proj.output_dim = 8;
    model::AtrousConfig at;
    at.dilation_rates = {1, 2};
    at.filters_per_branch = 8;
    at.output_h = 32;
    at.output_w = 32;

    const auto acct = report::parameter_accounting(enc, proj, at, 0);
    auto m = model::build_model(enc, proj, at, 0);
    CHECK(acct.total == m->parameter_count());
    int64_t group_sum = 0;
    bool has_stem = false, has_head = false;
    for (const auto& [name, count] : acct.groups) {
        group_sum += count;
        if (name.find("stem") != std::string::npos) has_stem = true;
        if (name.find("head") != std::string::npos) has_head = true;
    }
    CHECK(group_sum == acct.total);
    CHECK(has_stem);
    CHECK(has_head);
    CHECK(acct.markdown.find("**total**") != std::string::npos);
    CHECK(acct.markdown.find("reference") == std::string::npos);

    // With a reference the table reports the delta against it.
    const auto with_ref = report::parameter_accounting(enc, proj, at, acct.total);
    CHECK(with_ref.markdown.find("reference total") != std::string::npos);
    CHECK(with_ref.markdown.find("+0.000%") != std::string::npos);
}

TEST_CASE("build_report merges runs and enforces taxonomy agreement") {
    const auto base = testing::fresh_dir("report");
    const auto taxonomy = data::taxonomy_json();
    std::vector<eval::SweepRecord> r1{make_record(0.05, 1, "pretrained", 0.6),
                                      make_record(0.05, 1, "random", 0.5)};
    std::vector<eval::SweepRecord> r2{make_record(1.0, 1, "pretrained", 0.8),
                                      make_record(1.0, 1, "random", 0.75)};
    const auto d1 = fake_run_dir(base, "run1", r1, taxonomy);
    const auto d2 = fake_run_dir(base, "run2", r2, taxonomy);

    const auto out = base / "out";
    const auto result = report::build_report({d1, d2}, out, "0011aabb", false);
    CHECK(result.warnings.empty());
    CHECK(result.markdown.find("0.05") != std::string::npos);
    REQUIRE(fs::exists(out / "report.md"));
    {
        std::ifstream f(out / "report.md");
        std::string md((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
        CHECK(md.find("<!-- run=0011aabb -->") != std::string::npos);
    }
    CHECK(fs::exists(out / "accuracy_vs_fraction.svg"));
    {
        std::ifstream f(out / "accuracy_vs_fraction.svg");
        std::string svg((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
        CHECK(svg.find("run=0011aabb") != std::string::npos);
    }

    // A runs directory without sweep.csv only warns.
    const fs::path d3 = base / "run3";
    fs::create_directories(d3);
    std::ofstream(d3 / "run_manifest.json")
        << nlohmann::json{{"command", "eval"}, {"taxonomy", taxonomy}}.dump();
    const auto partial = report::build_report({d1, d3}, base / "out2", "0011aabb", false);
    CHECK(!partial.warnings.empty());

    // Taxonomy disagreement is fatal.
    auto other_tax = taxonomy;
    other_tax["classes"][0] = "gravel";
    const auto d4 = fake_run_dir(base, "run4", r2, other_tax);
    CHECK_THROWS_AS(report::build_report({d1, d4}, base / "out3", "x", false), DataError);

    // No usable records at all is also fatal.
    CHECK_THROWS_AS(report::build_report({d3}, base / "out4", "x", false), DataError);
}

TEST_CASE("single init mode still reports but omits comparison plots") {
    const auto base = testing::fresh_dir("report_single");
    std::vector<eval::SweepRecord> recs{make_record(0.05, 1, "random", 0.5),
                                        make_record(1.0, 1, "random", 0.7)};
    const auto d = fake_run_dir(base, "solo", recs, data::taxonomy_json());
    const auto result = report::build_report({d}, base / "out", "ff00ff00", false);
    CHECK(result.markdown.find("random") != std::string::npos);
    CHECK(!fs::exists(base / "out" / "accuracy_vs_fraction.svg"));
}

TEST_CASE("reference lines carry the documented accuracies") {
    const auto lines = report::reference_lines();
    REQUIRE(lines.size() == 4);
    bool found_high = false, found_low = false;
    for (const auto& l : lines) {
        if (l.y == doctest::Approx(91.1)) found_high = true;
        if (l.y == doctest::Approx(81.9)) found_low = true;
    }
    CHECK(found_high);
    CHECK(found_low);
}

}  // TEST_SUITE
