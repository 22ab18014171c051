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

#include "marsseg/cli/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "marsseg/cli/run_config.hpp"
#include "marsseg/common.hpp"
#include "marsseg/data/manifest.hpp"
#include "marsseg/data/subset.hpp"
#include "marsseg/data/synth.hpp"
#include "marsseg/eval/evaluate.hpp"
#include "marsseg/eval/metrics.hpp"
#include "marsseg/eval/sweep.hpp"
#include "marsseg/image.hpp"
#include "marsseg/losses/losses.hpp"
#include "marsseg/model/seg_model.hpp"
#include "marsseg/report/csv.hpp"
#include "marsseg/report/report.hpp"
#include "marsseg/report/svg.hpp"
#include "marsseg/threading.hpp"
#include "marsseg/train/checkpoint.hpp"
#include "marsseg/train/trainer.hpp"

namespace marsseg::cli {

namespace {

namespace fs = std::filesystem;

struct CommonOpts {
    std::string config_file;
    std::string data_root;
    std::string out_dir;
    int64_t seed = -1;  // -1: keep per-section seeds
    int image_size = 0;
    bool deterministic = false;
    int threads = 0;
};

void add_common(CLI::App* sub, CommonOpts* opts) {
    sub->add_option("--config", opts->config_file, "JSON config file (flags override its values)");
    sub->add_option("--data-root", opts->data_root,
                    fmt::format("dataset root (default: ${})", kDataRootEnv));
    sub->add_option("--out", opts->out_dir, "run directory (default: runs/<timestamp>-<hash>)");
    sub->add_option("--seed", opts->seed, "override the stage seed");
    sub->add_option("--image-size", opts->image_size,
                    "working resolution applied across pipeline sections");
    sub->add_flag("--deterministic", opts->deterministic, "single-worker reproducible mode");
    sub->add_option("--threads", opts->threads, "worker thread count");
}

RunConfig resolve_config(const CommonOpts& c) {
    std::optional<fs::path> file;
    if (!c.config_file.empty()) file = fs::path(c.config_file);
    RunConfig cfg = load_run_config(file);
    if (!c.data_root.empty()) cfg.data_root = c.data_root;
    if (c.image_size > 0) cfg.apply_image_size(c.image_size);
    if (c.seed >= 0) {
        const auto seed = static_cast<uint64_t>(c.seed);
        cfg.pretrain.seed = seed;
        cfg.finetune.seed = seed;
        cfg.synth.seed = seed;
    }
    if (c.threads > 0) set_num_threads(c.threads);
    if (c.deterministic) set_num_threads(1);
    return cfg;
}

RunManifest make_manifest(const std::string& command, const RunConfig& cfg, uint64_t seed,
                          nlohmann::json cli_extras = nlohmann::json::object()) {
    RunManifest man;
    man.command = command;
    man.config = cfg.to_json();
    if (!cli_extras.empty()) man.config["cli"] = std::move(cli_extras);
    man.seed = seed;
    man.timestamp = utc_timestamp();
    return man;
}

fs::path require_data_root(const RunConfig& cfg) {
    if (cfg.data_root.empty())
        throw ConfigError(
            fmt::format("no dataset root: pass --data-root, set dataRoot in the config, or "
                        "export {}",
                        kDataRootEnv));
    return cfg.data_root;
}

void finish_run(RunManifest& man, const fs::path& run_dir,
                std::vector<fs::path> outputs) {
    for (const auto& p : outputs) man.outputs.push_back(p.string());
    const auto manifest_path = run_dir / "run_manifest.json";
    man.outputs.push_back(manifest_path.string());
    man.save(manifest_path);
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) fmt::print(stderr, "warning: {}\n", w);
}

// Per-class CSV triple emitted by cmd_eval.
std::vector<fs::path> write_eval_csvs(const fs::path& run_dir, const eval::EvalResult& ev,
                                      const std::array<int64_t, data::kNumClasses>& dist,
                                      const std::string& run_ref) {
    const auto& names = data::class_names();
    std::vector<fs::path> outputs;

    report::Csv counts;
    counts.comments = {fmt::format("run={}", run_ref)};
    counts.header = {"true_class"};
    for (auto n : names) counts.header.push_back(std::string(n));
    for (int t = 0; t < data::kNumClasses; ++t) {
        std::vector<std::string> row{std::string(names[t])};
        for (int p = 0; p < data::kNumClasses; ++p)
            row.push_back(fmt::format("{}", ev.cm.counts[t][p]));
        counts.rows.push_back(std::move(row));
    }
    report::write_csv(run_dir / "confusion_counts.csv", counts);
    outputs.push_back(run_dir / "confusion_counts.csv");

    report::Csv normalized;
    normalized.comments = counts.comments;
    normalized.header = counts.header;
    for (int t = 0; t < data::kNumClasses; ++t) {
        std::vector<std::string> row{std::string(names[t])};
        for (int p = 0; p < data::kNumClasses; ++p) {
            const auto pct = ev.cm.normalized_percent(t, p);
            row.push_back(pct ? report::format_number(*pct) : "n/a");
        }
        normalized.rows.push_back(std::move(row));
    }
    report::write_csv(run_dir / "confusion_normalized.csv", normalized);
    outputs.push_back(run_dir / "confusion_normalized.csv");

    report::Csv recall;
    recall.comments = counts.comments;
    recall.header = {"class", "recall"};
    for (int c = 0; c < data::kNumClasses; ++c)
        recall.rows.push_back({std::string(names[c]),
                               ev.recall[c] ? report::format_number(*ev.recall[c]) : "n/a"});
    report::write_csv(run_dir / "recall.csv", recall);
    outputs.push_back(run_dir / "recall.csv");

    report::Csv distribution;
    distribution.comments = counts.comments;
    distribution.header = {"class", "labeled_pixels"};
    for (int c = 0; c < data::kNumClasses; ++c)
        distribution.rows.push_back({std::string(names[c]), fmt::format("{}", dist[c])});
    report::write_csv(run_dir / "class_distribution.csv", distribution);
    outputs.push_back(run_dir / "class_distribution.csv");

    report::write_confusion_heatmap(run_dir / "confusion.svg", "Confusion matrix (row %)", ev.cm,
                                    run_ref);
    outputs.push_back(run_dir / "confusion.svg");
    return outputs;
}

int cmd_synth(const CommonOpts& common) {
    RunConfig cfg = resolve_config(common);
    data::validate(cfg.synth);
    RunManifest man = make_manifest("synth", cfg, cfg.synth.seed);
    const fs::path run_dir = make_run_dir(common.out_dir, man.hash());
    const fs::path dataset_dir = cfg.data_root.empty() ? run_dir / "dataset" : cfg.data_root;

    nlohmann::json summary = data::synth_generate(cfg.synth, dataset_dir);
    summary["run"] = man.hash();
    const fs::path summary_path = run_dir / "synth_summary.json";
    std::ofstream f(summary_path, std::ios::binary);
    if (!f) throw DataError(fmt::format("cannot open {} for writing", summary_path.string()));
    f << summary.dump(2) << '\n';
    f.close();

    finish_run(man, run_dir, {dataset_dir, summary_path});
    fmt::print("{}\n", summary.dump(2));
    return 0;
}

int cmd_ingest(const CommonOpts& common) {
    RunConfig cfg = resolve_config(common);
    const fs::path root = require_data_root(cfg);
    const auto train = data::load_manifest(root, data::Split::train);
    const auto test = data::load_manifest(root, data::Split::test);

    RunManifest man = make_manifest("ingest", cfg, 0);
    const fs::path run_dir = make_run_dir(common.out_dir, man.hash());
    data::save_manifest_cache(train, run_dir / "train_manifest.tsv");
    data::save_manifest_cache(test, run_dir / "test_manifest.tsv");

    print_warnings(train.warnings);
    print_warnings(test.warnings);
    fmt::print("train: {} images ({} labeled), test: {} images, warnings: {}\n",
               train.total_count(), train.labeled_count(), test.total_count(),
               train.warnings.size() + test.warnings.size());
    finish_run(man, run_dir, {run_dir / "train_manifest.tsv", run_dir / "test_manifest.tsv"});
    return 0;
}

int cmd_pretrain(const CommonOpts& common) {
    RunConfig cfg = resolve_config(common);
    train::validate(cfg.pretrain);
    const fs::path root = require_data_root(cfg);
    const auto manifest = data::load_manifest(root, data::Split::train);

    RunManifest man = make_manifest("pretrain", cfg, cfg.pretrain.seed);
    const fs::path run_dir = make_run_dir(common.out_dir, man.hash());

    auto m = model::build_model(cfg.encoder, cfg.projection, cfg.atrous,
                                model::model_build_seed(cfg.pretrain.seed));
    nlohmann::json provenance{{"stage", "pretrain"}, {"run", man.hash()}};
    const train::PretrainResult res = train::pretrain(manifest, *m, cfg.pretrain, provenance);
    print_warnings(res.warnings);

    const fs::path ckpt_path = run_dir / "pretrained.ckpt";
    train::save_checkpoint(res.checkpoint, ckpt_path);

    report::Csv history;
    history.comments = {fmt::format("run={}", man.hash())};
    history.header = {"step", "loss"};
    for (size_t i = 0; i < res.step_losses.size(); ++i)
        history.rows.push_back(
            {fmt::format("{}", i + 1), report::format_number(res.step_losses[i])});
    report::write_csv(run_dir / "pretrain_history.csv", history);

    if (!res.step_losses.empty())
        fmt::print("pretrained {} steps, final loss {:.4f} -> {}\n", res.step_losses.size(),
                   res.step_losses.back(), ckpt_path.string());
    else
        fmt::print("pretrained 0 steps (initialization checkpoint) -> {}\n", ckpt_path.string());
    finish_run(man, run_dir, {ckpt_path, run_dir / "pretrain_history.csv"});
    return 0;
}

int cmd_finetune(const CommonOpts& common, const std::string& init_mode,
                 const std::string& checkpoint) {
    if (init_mode != "random" && init_mode != "pretrained")
        throw ConfigError(fmt::format("--init must be random|pretrained, got '{}'", init_mode));
    RunConfig cfg = resolve_config(common);
    train::validate(cfg.finetune);
    const fs::path root = require_data_root(cfg);
    const auto labeled = data::load_manifest(root, data::Split::train);

    const int64_t n_labeled = labeled.labeled_count();
    if (n_labeled == 0) throw DataError("training manifest has no labeled images");
    const int64_t selected = data::subset_size(cfg.finetune.label_fraction, n_labeled);
    fmt::print("selected {} of {} labeled images (fraction {})\n", selected, n_labeled,
               cfg.finetune.label_fraction);

    RunManifest man = make_manifest("finetune", cfg, cfg.finetune.seed,
                                    {{"init", init_mode}, {"checkpoint", checkpoint}});
    const fs::path run_dir = make_run_dir(common.out_dir, man.hash());

    auto m = model::build_model(cfg.encoder, cfg.projection, cfg.atrous,
                                model::model_build_seed(cfg.finetune.seed));
    if (init_mode == "pretrained") {
        if (checkpoint.empty())
            throw ConfigError("--init pretrained requires --checkpoint <pretrained.ckpt>");
        const train::Checkpoint ckpt = train::load_checkpoint(checkpoint);
        train::load_into_model(ckpt, *m, {"encoder.", "projection."});
    }

    nlohmann::json provenance{{"stage", "finetune"}, {"init", init_mode}, {"run", man.hash()}};
    const train::FinetuneResult res = train::finetune(labeled, *m, cfg.finetune, provenance);
    print_warnings(res.warnings);

    const fs::path ckpt_path = run_dir / "finetuned.ckpt";
    train::save_checkpoint(res.best, ckpt_path);

    report::Csv history;
    history.comments = {fmt::format("run={}", man.hash())};
    history.header = {"epoch", "train_loss", "val_loss", "val_accuracy"};
    for (const auto& e : res.history)
        history.rows.push_back({fmt::format("{}", e.epoch), report::format_number(e.train_loss),
                                report::format_number(e.val_loss),
                                report::format_number(e.val_accuracy)});
    report::write_csv(run_dir / "history.csv", history);

    fmt::print("finetuned {} epochs (best epoch {}) -> {}\n", res.epochs_run, res.best_epoch,
               ckpt_path.string());
    finish_run(man, run_dir, {ckpt_path, run_dir / "history.csv"});
    return 0;
}

int cmd_eval(const CommonOpts& common, const std::string& checkpoint,
             const std::string& predictions, bool emit_masks) {
    RunConfig cfg = resolve_config(common);
    const fs::path root = require_data_root(cfg);
    const auto test = data::load_manifest(root, data::Split::test);
    const int image_size = cfg.finetune.image_size;

    RunManifest man = make_manifest("eval", cfg, 0,
                                    {{"checkpoint", checkpoint}, {"predictions", predictions}});
    const fs::path run_dir = make_run_dir(common.out_dir, man.hash());

    eval::EvalResult ev;
    if (!predictions.empty()) {
        ev = eval::evaluate_predictions(predictions, test, image_size);
    } else {
        if (checkpoint.empty())
            throw ConfigError("eval requires --checkpoint <model.ckpt> or --predictions <dir>");
        const train::Checkpoint ckpt = train::load_checkpoint(checkpoint);
        auto m = train::model_from_checkpoint(ckpt);
        std::function<void(const data::RawSample&, const std::vector<uint8_t>&)> on_pred;
        if (emit_masks) {
            const fs::path mask_dir = run_dir / "masks";
            fs::create_directories(mask_dir);
            const std::string run_ref = man.hash();
            on_pred = [mask_dir, image_size, run_ref](const data::RawSample& item,
                                                      const std::vector<uint8_t>& pred) {
                ImageU8 img;
                img.width = image_size;
                img.height = image_size;
                img.channels = 1;
                img.pixels = pred;
                write_png(mask_dir / (item.image_path.stem().string() + ".png"), img,
                          {{"run", run_ref}});
            };
        }
        ev = eval::evaluate_model(*m, test, image_size, cfg.finetune.batch_size, on_pred);
    }
    print_warnings(ev.warnings);

    std::vector<std::string> dist_warnings;
    const auto dist = eval::class_distribution(test, image_size, &dist_warnings);
    print_warnings(dist_warnings);

    auto outputs = write_eval_csvs(run_dir, ev, dist, man.hash());
    nlohmann::json metrics{{"accuracy", ev.accuracy}, {"images", ev.images}, {"run", man.hash()}};
    const fs::path metrics_path = run_dir / "metrics.json";
    std::ofstream f(metrics_path, std::ios::binary);
    if (!f) throw DataError(fmt::format("cannot open {} for writing", metrics_path.string()));
    f << metrics.dump(2) << '\n';
    f.close();
    outputs.push_back(metrics_path);

    fmt::print("accuracy {:.4f} over {} images\n", ev.accuracy, ev.images);
    finish_run(man, run_dir, std::move(outputs));
    return 0;
}

int cmd_sweep(const CommonOpts& common, const std::string& pretrained_path) {
    RunConfig cfg = resolve_config(common);
    eval::validate(cfg.sweep);
    train::validate(cfg.finetune);
    const fs::path root = require_data_root(cfg);
    const auto train_manifest = data::load_manifest(root, data::Split::train);
    const auto test_manifest = data::load_manifest(root, data::Split::test);

    RunManifest man = make_manifest("sweep", cfg, 0, {{"pretrainedCheckpoint", pretrained_path}});
    const fs::path run_dir = make_run_dir(common.out_dir, man.hash());
    const fs::path csv_path = run_dir / "sweep.csv";

    std::vector<eval::SweepRecord> completed;
    if (fs::exists(csv_path)) {
        completed = report::parse_sweep_rows(report::read_csv(csv_path));
        fmt::print("resuming sweep: {} completed records found\n", completed.size());
    } else {
        report::Csv fresh;
        fresh.comments = {fmt::format("run={}", man.hash())};
        fresh.header = report::sweep_csv_header();
        report::write_csv(csv_path, fresh);
    }

    std::optional<train::Checkpoint> pretrained;
    if (!pretrained_path.empty()) pretrained = train::load_checkpoint(pretrained_path);

    const auto outcome = eval::run_sweep(
        train_manifest, test_manifest, cfg.encoder, cfg.projection, cfg.atrous, cfg.finetune,
        cfg.sweep, pretrained ? &*pretrained : nullptr, completed,
        [&](const eval::SweepRecord& rec) {
            report::append_csv_row(csv_path, report::sweep_record_row(rec));
            fmt::print("fraction {} seed {} {}: accuracy {:.4f} ({} epochs)\n", rec.fraction,
                       rec.seed, rec.init_mode, rec.accuracy, rec.epochs);
        });
    print_warnings(outcome.errors);
    if (outcome.records.empty()) throw Error("every sweep run failed");

    std::vector<fs::path> outputs{csv_path};
    report::write_line_plot(run_dir / "accuracy_vs_fraction.svg",
                            "Test accuracy vs label fraction", "label fraction", "accuracy (%)",
                            /*log_x=*/true, report::accuracy_series(outcome.records),
                            report::reference_lines(), man.hash());
    outputs.push_back(run_dir / "accuracy_vs_fraction.svg");
    const auto rock = report::bigrock_recall_series(outcome.records);
    if (!rock.empty()) {
        report::write_line_plot(run_dir / "bigrock_recall_vs_fraction.svg",
                                "bigRock recall vs label fraction", "label fraction", "recall (%)",
                                /*log_x=*/true, rock, {}, man.hash());
        outputs.push_back(run_dir / "bigrock_recall_vs_fraction.svg");
    }

    fmt::print("{}", report::sweep_summary_table(outcome.records));
    finish_run(man, run_dir, std::move(outputs));
    return 0;
}

int cmd_report(const CommonOpts& common, const std::vector<std::string>& run_dirs,
               bool paper_params) {
    RunConfig cfg = resolve_config(common);
    nlohmann::json dirs_json = nlohmann::json::array();
    for (const auto& d : run_dirs) dirs_json.push_back(d);
    RunManifest man =
        make_manifest("report", cfg, 0, {{"runDirs", dirs_json}, {"paperParams", paper_params}});
    const fs::path run_dir = make_run_dir(common.out_dir, man.hash());

    std::vector<fs::path> dirs(run_dirs.begin(), run_dirs.end());
    const report::ReportResult result =
        report::build_report(dirs, run_dir, man.hash(), paper_params);
    print_warnings(result.warnings);
    fmt::print("{}", result.markdown);
    finish_run(man, run_dir, result.outputs);
    return 0;
}

int cmd_loss_surface(const CommonOpts& common) {
    RunConfig cfg = resolve_config(common);
    validate(cfg.loss_surface);
    RunManifest man = make_manifest("loss-surface", cfg, 0);
    const fs::path run_dir = make_run_dir(common.out_dir, man.hash());

    const auto& lc = cfg.loss_surface;
    std::vector<double> pos(static_cast<size_t>(lc.resolution));
    std::vector<double> neg(static_cast<size_t>(lc.resolution));
    for (int i = 0; i < lc.resolution; ++i) {
        const double t = static_cast<double>(i) / (lc.resolution - 1);
        pos[static_cast<size_t>(i)] = lc.pos_min + t * (lc.pos_max - lc.pos_min);
        neg[static_cast<size_t>(i)] = lc.neg_min + t * (lc.neg_max - lc.neg_min);
    }
    const std::vector<double> losses = losses::loss_surface_sample(pos, neg);

    report::Csv csv;
    csv.comments = {fmt::format("run={}", man.hash())};
    csv.header = {"s_pos", "s_neg_sum", "loss"};
    for (size_t i = 0; i < pos.size(); ++i)
        for (size_t j = 0; j < neg.size(); ++j)
            csv.rows.push_back({report::format_number(pos[i]), report::format_number(neg[j]),
                                report::format_number(losses[i * neg.size() + j])});
    report::write_csv(run_dir / "loss_surface.csv", csv);

    fmt::print("wrote {} grid points -> {}\n", csv.rows.size(),
               (run_dir / "loss_surface.csv").string());
    finish_run(man, run_dir, {run_dir / "loss_surface.csv"});
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Mars terrain segmentation: contrastive pretraining and label-fraction "
                 "experiments"};
    app.require_subcommand(0, 1);

    CommonOpts common;
    std::function<int()> action;

    auto* synth = app.add_subcommand("synth", "generate the synthetic desk-scale dataset");
    add_common(synth, &common);
    synth->callback([&] { action = [&] { return cmd_synth(common); }; });

    auto* ingest = app.add_subcommand("ingest", "validate a dataset layout and cache manifests");
    add_common(ingest, &common);
    ingest->callback([&] { action = [&] { return cmd_ingest(common); }; });

    auto* pretrain = app.add_subcommand("pretrain", "contrastive encoder pretraining");
    add_common(pretrain, &common);
    pretrain->callback([&] { action = [&] { return cmd_pretrain(common); }; });

    auto* finetune = app.add_subcommand("finetune", "supervised segmentation finetuning");
    add_common(finetune, &common);
    auto init_mode = std::make_shared<std::string>("random");
    auto ft_ckpt = std::make_shared<std::string>();
    finetune->add_option("--init", *init_mode, "initialization: random|pretrained");
    finetune->add_option("--checkpoint", *ft_ckpt, "pretrained checkpoint (with --init pretrained)");
    finetune->callback(
        [&, init_mode, ft_ckpt] { action = [&, init_mode, ft_ckpt] {
            return cmd_finetune(common, *init_mode, *ft_ckpt);
        }; });

    auto* evalc = app.add_subcommand("eval", "evaluate a checkpoint or prediction directory");
    add_common(evalc, &common);
    auto ev_ckpt = std::make_shared<std::string>();
    auto ev_preds = std::make_shared<std::string>();
    auto emit_masks = std::make_shared<bool>(false);
    evalc->add_option("--checkpoint", *ev_ckpt, "model checkpoint to evaluate");
    evalc->add_option("--predictions", *ev_preds, "directory of predicted class-id PNGs");
    evalc->add_flag("--emit-masks", *emit_masks, "write predicted masks as PNGs");
    evalc->callback([&, ev_ckpt, ev_preds, emit_masks] {
        action = [&, ev_ckpt, ev_preds, emit_masks] {
            return cmd_eval(common, *ev_ckpt, *ev_preds, *emit_masks);
        };
    });

    auto* sweep = app.add_subcommand("sweep", "label-fraction sweep over seeds and init modes");
    add_common(sweep, &common);
    auto sw_ckpt = std::make_shared<std::string>();
    sweep->add_option("--pretrained-checkpoint", *sw_ckpt,
                      "checkpoint supplying encoder/projection weights for pretrained-init runs");
    sweep->callback([&, sw_ckpt] { action = [&, sw_ckpt] { return cmd_sweep(common, *sw_ckpt); }; });

    auto* reportc = app.add_subcommand("report", "merge sweep runs into tables and plots");
    add_common(reportc, &common);
    auto dirs = std::make_shared<std::vector<std::string>>();
    auto paper_params = std::make_shared<bool>(false);
    reportc->add_option("dirs", *dirs, "completed run directories")->required();
    reportc->add_flag("--paper-params", *paper_params,
                      "include full-scale parameter accounting");
    reportc->callback([&, dirs, paper_params] {
        action = [&, dirs, paper_params] { return cmd_report(common, *dirs, *paper_params); };
    });

    auto* surface = app.add_subcommand("loss-surface", "export the contrastive loss grid");
    add_common(surface, &common);
    surface->callback([&] { action = [&] { return cmd_loss_surface(common); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // malformed invocation is a config error
    }

    if (!action) {
        fmt::print("{}", app.help());
        return 1;
    }
    try {
        return action();
    } catch (const ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return 1;
    } catch (const DataError& e) {
        fmt::print(stderr, "data error: {}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 3;
    }
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> full;
    full.reserve(args.size() + 1);
    full.emplace_back("marsseg");
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(full.size());
    for (const auto& a : full) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace marsseg::cli
