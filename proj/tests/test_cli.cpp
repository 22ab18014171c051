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

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "marsseg/cli/commands.hpp"
#include "marsseg/common.hpp"
#include "marsseg/cli/run_config.hpp"
#include "marsseg/data/manifest.hpp"
#include "marsseg/data/preprocess.hpp"
#include "marsseg/image.hpp"
#include "oracles.hpp"

using namespace marsseg;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// Desk-scale-but-tiny configuration shared by the CLI tests.
const fs::path& tiny_config() {
    static const fs::path path = [] {
        unsetenv(cli::kDataRootEnv);  // isolate from the environment
        const nlohmann::json cfg{
            {"imageSize", 64},
            {"encoder",
             {{"stageBlockCounts", {1, 1}},
              {"widthMultiplier", 0.0625},
              {"useSelectiveKernels", true},
              {"skReduction", 4},
              {"skMinAttentionWidth", 4}}},
            {"projection",
             {{"layerCount", 2},
              {"hiddenWidth", 16},
              {"outputDim", 8},
              {"finetuneAttachLayer", 1}}},
            {"atrous", {{"dilationRates", {1, 2}}, {"filtersPerBranch", 8}}},
            {"pretrain",
             {{"batchSizePretrain", 4},
              {"steps", 2},
              {"learningRate", 0.05},
              {"temperature", 0.5},
              {"seed", 3}}},
            {"finetune",
             {{"batchSize", 4},
              {"learningRate", 0.02},
              {"maxEpochs", 1},
              {"labelFraction", 1.0},
              {"seed", 5},
              {"validationFraction", 0.25}}},
            {"sweep", {{"fractions", {0.5}}, {"seeds", {1}}, {"initModes", {"random"}}}},
            {"lossSurface", {{"posRange", {0.5, 4.0}}, {"negRange", {0.0, 4.0}},
                             {"resolution", 5}}}};
        const fs::path p = testing::fresh_dir("cli_cfg") / "tiny.json";
        std::ofstream f(p);
        f << cfg.dump(2);
        return p;
    }();
    return path;
}

int run_cmd(std::vector<std::string> args) { return marsseg::cli::run_cli(args); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("malformed invocations exit with the config code") {
    CHECK(run_cmd({"no-such-command"}) == 1);
    CHECK(run_cmd({"synth", "--no-such-flag"}) == 1);
    CHECK(run_cmd({}) == 1);  // bare call prints help and fails

    // eval needs either a checkpoint or predictions.
    const auto root = testing::small_dataset();
    CHECK(run_cmd({"eval", "--config", tiny_config().string(), "--data-root", root.string(),
               "--out", (testing::fresh_dir("cli_eval_cfg") / "run").string()}) == 1);
}

TEST_CASE("missing data root is a config error, broken layout a data error") {
    CHECK(run_cmd({"ingest", "--config", tiny_config().string()}) == 1);

    const auto empty = testing::fresh_dir("cli_empty_root");
    CHECK(run_cmd({"ingest", "--config", tiny_config().string(), "--data-root", empty.string(),
               "--out", (empty / "run").string()}) == 2);
}

TEST_CASE("invalid config values exit with the config code") {
    const auto dir = testing::fresh_dir("cli_badcfg");
    const fs::path bad = dir / "bad.json";
    {
        std::ofstream f(bad);
        f << R"({"synth": {"classFrequencies": [0.9, 0.9, 0.1, 0.1]}})";
    }
    CHECK(run_cmd({"synth", "--config", bad.string(), "--out", (dir / "run").string()}) == 1);

    const fs::path junk = dir / "junk.json";
    {
        std::ofstream f(junk);
        f << "{ not json";
    }
    CHECK(run_cmd({"ingest", "--config", junk.string()}) == 1);
}

TEST_CASE("synth then ingest round-trips a dataset") {
    const auto dir = testing::fresh_dir("cli_synth");
    const fs::path data = dir / "data";
    const fs::path cfg_path = dir / "synth.json";
    {
        std::ofstream f(cfg_path);
        f << R"({"synth": {"numTrain": 6, "numTest": 2, "imageSize": 64, "seed": 4}})";
    }
    CHECK(run_cmd({"synth", "--config", cfg_path.string(), "--data-root", data.string(), "--out",
               (dir / "synth_run").string()}) == 0);
    CHECK(fs::exists(dir / "synth_run" / "synth_summary.json"));
    CHECK(fs::exists(dir / "synth_run" / "run_manifest.json"));

    CHECK(run_cmd({"ingest", "--data-root", data.string(), "--out",
               (dir / "ingest_run").string()}) == 0);
    const auto cached =
        data::load_manifest_cache(dir / "ingest_run" / "train_manifest.tsv");
    CHECK(cached.items.size() == 6);

    // The run manifest records command, hash and outputs.
    const auto man = nlohmann::json::parse(slurp(dir / "ingest_run" / "run_manifest.json"));
    CHECK(man.at("command") == "ingest");
    CHECK(man.at("hash").get<std::string>().size() == 16);
    CHECK(man.at("outputs").size() >= 2);
    CHECK(man.at("taxonomy").at("classes").size() == 6);
}

TEST_CASE("loss-surface grid is deterministic and traceable") {
    const auto dir = testing::fresh_dir("cli_surface");
    auto run = [&](const std::string& name) {
        const fs::path out = dir / name;
        REQUIRE(run_cmd({"loss-surface", "--config", tiny_config().string(), "--out",
                     out.string()}) == 0);
        return slurp(out / "loss_surface.csv");
    };
    const std::string a = run("a");
    const std::string b = run("b");
    CHECK(a == b);  // byte-identical across runs
    CHECK(a.find("# run=") == 0);
    CHECK(a.find("s_pos,s_neg_sum,loss") != std::string::npos);
    // 5x5 grid plus comment and header.
    CHECK(std::count(a.begin(), a.end(), '\n') == 27);
}

TEST_CASE("finetune emits byte-identical artifacts for identical invocations") {
    const auto root = testing::small_dataset();
    const auto dir = testing::fresh_dir("cli_ft");
    auto run = [&](const std::string& name) {
        const fs::path out = dir / name;
        REQUIRE(run_cmd({"finetune", "--config", tiny_config().string(), "--data-root",
                     root.string(), "--out", out.string(), "--deterministic"}) == 0);
        return out;
    };
    const auto a = run("a");
    const auto b = run("b");
    CHECK(slurp(a / "history.csv") == slurp(b / "history.csv"));
    CHECK(slurp(a / "history.csv").find("# run=") == 0);
    CHECK(slurp(a / "finetuned.ckpt") == slurp(b / "finetuned.ckpt"));

    // A different seed changes the manifest hash (and therefore the run id).
    const fs::path c = dir / "c";
    REQUIRE(run_cmd({"finetune", "--config", tiny_config().string(), "--data-root", root.string(),
                 "--out", c.string(), "--seed", "6"}) == 0);
    const auto man_a = nlohmann::json::parse(slurp(a / "run_manifest.json"));
    const auto man_c = nlohmann::json::parse(slurp(c / "run_manifest.json"));
    CHECK(man_a.at("hash") != man_c.at("hash"));
}

TEST_CASE("eval scores stored predictions and writes the metric set") {
    const auto root = testing::small_dataset();
    const auto test = data::load_manifest(root, data::Split::test);
    const auto dir = testing::fresh_dir("cli_eval");
    const fs::path preds = dir / "preds";
    fs::create_directories(preds);
    for (const auto& item : test.items) {
        const auto sample = data::load_sample(item, 64);
        ImageU8 img;
        img.width = 64;
        img.height = 64;
        img.channels = 1;
        img.pixels.resize(sample.labels.size());
        for (size_t i = 0; i < sample.labels.size(); ++i)
            img.pixels[i] = sample.labels[i] == 255 ? 0 : sample.labels[i];
        write_png(preds / (item.image_path.stem().string() + ".png"), img);
    }

    const fs::path out = dir / "run";
    REQUIRE(run_cmd({"eval", "--config", tiny_config().string(), "--data-root", root.string(),
                 "--predictions", preds.string(), "--out", out.string()}) == 0);
    const auto metrics = nlohmann::json::parse(slurp(out / "metrics.json"));
    CHECK(metrics.at("accuracy").get<double>() == doctest::Approx(1.0));
    CHECK(metrics.at("images") == static_cast<int64_t>(test.items.size()));
    CHECK(metrics.contains("run"));
    for (const char* f : {"confusion_counts.csv", "confusion_normalized.csv", "recall.csv",
                          "class_distribution.csv", "confusion.svg"}) {
        CHECK(fs::exists(out / f));
        CHECK(slurp(out / f).find(metrics.at("run").get<std::string>()) != std::string::npos);
    }

    // A prediction directory missing one file is a data error.
    fs::remove(preds / (test.items[0].image_path.stem().string() + ".png"));
    CHECK(run_cmd({"eval", "--config", tiny_config().string(), "--data-root", root.string(),
               "--predictions", preds.string(), "--out", (dir / "run2").string()}) == 2);
}

TEST_CASE("pipeline: pretrain, finetune from it, eval the checkpoint") {
    const auto root = testing::small_dataset();
    const auto dir = testing::fresh_dir("cli_pipe");

    const fs::path pre = dir / "pre";
    REQUIRE(run_cmd({"pretrain", "--config", tiny_config().string(), "--data-root", root.string(),
                 "--out", pre.string()}) == 0);
    CHECK(fs::exists(pre / "pretrained.ckpt"));
    const std::string hist = slurp(pre / "pretrain_history.csv");
    CHECK(hist.find("step,loss") != std::string::npos);

    const fs::path ft = dir / "ft";
    REQUIRE(run_cmd({"finetune", "--config", tiny_config().string(), "--data-root", root.string(),
                 "--init", "pretrained", "--checkpoint", (pre / "pretrained.ckpt").string(),
                 "--out", ft.string()}) == 0);
    CHECK(fs::exists(ft / "finetuned.ckpt"));

    // --init pretrained without a checkpoint is a config error.
    CHECK(run_cmd({"finetune", "--config", tiny_config().string(), "--data-root", root.string(),
               "--init", "pretrained", "--out", (dir / "ft_bad").string()}) == 1);

    const fs::path ev = dir / "ev";
    REQUIRE(run_cmd({"eval", "--config", tiny_config().string(), "--data-root", root.string(),
                 "--checkpoint", (ft / "finetuned.ckpt").string(), "--out", ev.string(),
                 "--emit-masks"}) == 0);
    const auto metrics = nlohmann::json::parse(slurp(ev / "metrics.json"));
    CHECK(metrics.at("accuracy").get<double>() >= 0.0);
    CHECK(fs::exists(ev / "masks"));
    int masks = 0;
    for (const auto& e : fs::directory_iterator(ev / "masks")) {
        (void)e;
        ++masks;
    }
    CHECK(masks == 8);  // one per test image
}

TEST_CASE("sweep produces the csv, plot and summary, and resumes cleanly") {
    const auto root = testing::small_dataset();
    const auto dir = testing::fresh_dir("cli_sweep");
    const fs::path out = dir / "run";
    REQUIRE(run_cmd({"sweep", "--config", tiny_config().string(), "--data-root", root.string(),
                 "--out", out.string()}) == 0);
    const std::string csv = slurp(out / "sweep.csv");
    CHECK(csv.find("fraction,seed,init_mode,accuracy") != std::string::npos);
    CHECK(fs::exists(out / "accuracy_vs_fraction.svg"));

    // Rerunning against the same directory resumes: the csv is unchanged.
    REQUIRE(run_cmd({"sweep", "--config", tiny_config().string(), "--data-root", root.string(),
                 "--out", out.string()}) == 0);
    CHECK(slurp(out / "sweep.csv") == csv);

    // Report over the completed run.
    const fs::path rep = dir / "report";
    REQUIRE(run_cmd({"report", out.string(), "--out", rep.string()}) == 0);
    CHECK(fs::exists(rep / "report.md"));

    // Reporting a directory without a run manifest is a data error.
    CHECK(run_cmd({"report", (dir / "nothing").string(), "--out",
               (dir / "rep2").string()}) == 2);
}

TEST_CASE("run manifest hash ignores the timestamp but tracks the config") {
    cli::RunManifest a;
    a.command = "finetune";
    a.config = {{"x", 1}};
    a.seed = 7;
    a.timestamp = "20260101T000000Z";
    cli::RunManifest b = a;
    b.timestamp = "20270101T000000Z";
    CHECK(a.hash() == b.hash());
    b.config["x"] = 2;
    CHECK(a.hash() != b.hash());
    b = a;
    b.seed = 8;
    CHECK(a.hash() != b.hash());
    b = a;
    b.command = "eval";
    CHECK(a.hash() != b.hash());
}

TEST_CASE("config file loading applies precedence and image size") {
    const auto cfg = cli::load_run_config(tiny_config());
    CHECK(cfg.encoder.stage_block_counts == std::vector<int>{1, 1});
    CHECK(cfg.pretrain.image_size == 64);          // top-level imageSize
    CHECK(cfg.pretrain.augment.output_size == 64);
    CHECK(cfg.finetune.image_size == 64);
    CHECK(cfg.atrous.output_h == 64);
    CHECK(cfg.loss_surface.resolution == 5);
    CHECK(cfg.sweep.init_modes == std::vector<std::string>{"random"});

    CHECK_THROWS_AS(cli::load_run_config(fs::path("/nonexistent/cfg.json")), ConfigError);
}

}  // TEST_SUITE
