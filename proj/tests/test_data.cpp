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
#include <set>

#include <doctest.h>

#include "marsseg/common.hpp"
#include "marsseg/data/manifest.hpp"
#include "marsseg/data/preprocess.hpp"
#include "marsseg/data/subset.hpp"
#include "marsseg/data/synth.hpp"
#include "marsseg/data/taxonomy.hpp"
#include "marsseg/image.hpp"
#include "oracles.hpp"

using namespace marsseg;
namespace fs = std::filesystem;

namespace {

ImageU8 flat_image(int w, int h, int channels, uint8_t value) {
    ImageU8 img;
    img.width = w;
    img.height = h;
    img.channels = channels;
    img.pixels.assign(static_cast<size_t>(w) * h * channels, value);
    return img;
}

// Minimal corpus in the expected on-disk layout. Returns its root.
fs::path tiny_corpus() {
    const auto root = testing::fresh_dir("corpus");
    fs::create_directories(root / "images");
    fs::create_directories(root / "labels" / "train");
    fs::create_directories(root / "labels" / "test");
    fs::create_directories(root / "masks" / "rover");
    fs::create_directories(root / "masks" / "range");

    write_png(root / "images" / "a.png", flat_image(8, 8, 1, 100));
    write_png(root / "labels" / "train" / "a.png", flat_image(8, 8, 1, 1));
    write_png(root / "masks" / "rover" / "a.png", flat_image(8, 8, 1, 0));

    write_png(root / "images" / "b.png", flat_image(8, 8, 3, 50));
    write_png(root / "labels" / "test" / "b.png", flat_image(8, 8, 1, 2));

    write_png(root / "images" / "c.png", flat_image(8, 8, 1, 200));  // unlabeled
    return root;
}

data::DatasetManifest fake_manifest(int n) {
    data::DatasetManifest m;
    for (int i = 0; i < n; ++i) {
        data::RawSample s;
        s.image_path = fmt::format("/fake/{:05d}.png", i);
        s.width = 8;
        s.height = 8;
        m.items.push_back(std::move(s));
    }
    return m;
}

std::set<std::string> names(const data::DatasetManifest& m) {
    std::set<std::string> out;
    for (const auto& s : m.items) out.insert(s.image_path.string());
    return out;
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("taxonomy is the fixed six-class table") {
    CHECK(data::kNumClasses == 6);
    CHECK(data::class_name(data::kSoil) == "soil");
    CHECK(data::class_name(data::kBigRock) == "bigRock");
    CHECK(data::class_name(data::kRover) == "rover");
    CHECK(data::class_name(data::kBackground) == "background");
    const auto j = data::taxonomy_json();
    CHECK(j.at("classes").size() == 6);
    CHECK(j.at("nullLabel") == 255);
}

TEST_CASE("preprocess scales, brightens and clips") {
    auto t = data::preprocess(flat_image(4, 4, 1, 128), 4);
    REQUIRE(t.shape() == std::vector<int64_t>{4, 4, 3});
    for (int64_t i = 0; i < t.size(); ++i)
        CHECK(t[i] == doctest::Approx(0.7529411764705882).epsilon(1e-7));

    auto bright = data::preprocess(flat_image(4, 4, 1, 200), 4);
    for (int64_t i = 0; i < bright.size(); ++i) CHECK(bright[i] == 1.0f);

    auto dark = data::preprocess(flat_image(4, 4, 1, 0), 4);
    for (int64_t i = 0; i < dark.size(); ++i) CHECK(dark[i] == 0.0f);

    // Grayscale replicates to three identical channels; RGB keeps channels.
    ImageU8 rgb = flat_image(2, 2, 3, 0);
    rgb.at(0, 0, 0) = 60;
    rgb.at(0, 0, 1) = 120;
    auto tr = data::preprocess(rgb, 2);
    CHECK(tr.at(0, 0, 0) == doctest::Approx(60 / 255.0 * 1.5));
    CHECK(tr.at(0, 0, 1) == doctest::Approx(120 / 255.0 * 1.5));
    CHECK(tr.at(0, 0, 2) == 0.0f);
}

TEST_CASE("resize_mask never invents label values") {
    ImageU8 mask = flat_image(7, 7, 1, 0);
    mask.at(0, 0) = 3;
    mask.at(6, 6) = 255;
    mask.at(3, 3) = 1;
    auto small = data::resize_mask(mask, 4);
    std::set<uint8_t> allowed{0, 1, 3, 255};
    for (uint8_t p : small.pixels) CHECK(allowed.count(p) == 1);

    auto constant = data::resize_mask(flat_image(9, 9, 1, 2), 5);
    for (uint8_t p : constant.pixels) CHECK(p == 2);

    CHECK_THROWS_AS(data::resize_mask(flat_image(4, 4, 3, 0), 2), Error);
}

TEST_CASE("merge_masks applies rover > range > terrain precedence") {
    auto terrain = flat_image(2, 2, 1, 0);
    terrain.pixels = {1, 255, 0, 2};
    auto rover = flat_image(2, 2, 1, 0);
    rover.pixels = {0, 1, 0, 0};
    auto range = flat_image(2, 2, 1, 0);
    range.pixels = {0, 1, 1, 0};

    const auto merged = data::merge_masks(terrain, &rover, &range);
    CHECK(merged[0] == data::kBedrock);     // terrain only
    CHECK(merged[1] == data::kRover);       // rover wins over range
    CHECK(merged[2] == data::kBackground);  // range over terrain
    CHECK(merged[3] == data::kSand);

    // Masks are optional; unlabeled terrain stays null.
    terrain.pixels = {255, 255, 3, 0};
    const auto bare = data::merge_masks(terrain, nullptr, nullptr);
    CHECK(bare[0] == 255);
    CHECK(bare[2] == data::kBigRock);

    auto bad = flat_image(2, 2, 1, 7);  // outside {0..3, 255}
    CHECK_THROWS_AS(data::merge_masks(bad, nullptr, nullptr), DataError);

    auto wrong_size = flat_image(3, 2, 1, 0);
    CHECK_THROWS_AS(data::merge_masks(terrain, &wrong_size, nullptr), Error);
}

TEST_CASE("manifest separates splits and never leaks test labels") {
    const auto root = tiny_corpus();

    const auto train = data::load_manifest(root, data::Split::train);
    CHECK(train.warnings.empty());
    REQUIRE(train.items.size() == 2);  // a (labeled) + c (unlabeled); b excluded
    CHECK(train.items[0].image_path.filename() == "a.png");
    CHECK(train.items[1].image_path.filename() == "c.png");
    CHECK(train.labeled_count() == 1);
    CHECK(train.items[0].label_path.has_value());
    CHECK(train.items[0].rover_mask_path.has_value());
    CHECK(!train.items[0].range_mask_path.has_value());
    CHECK(train.items[0].camera == data::CameraKind::navcam_gray);

    const auto test = data::load_manifest(root, data::Split::test);
    REQUIRE(test.items.size() == 1);
    CHECK(test.items[0].image_path.filename() == "b.png");
    CHECK(test.items[0].camera == data::CameraKind::mastcam_color);
    CHECK(test.labeled_count() == 1);
}

TEST_CASE("manifest excludes items with broken masks and records why") {
    const auto root = tiny_corpus();
    {
        std::ofstream f(root / "masks" / "rover" / "c.png", std::ios::binary);
        f << "garbage";
    }
    const auto train = data::load_manifest(root, data::Split::train);
    REQUIRE(train.items.size() == 1);  // c excluded
    CHECK(train.items[0].image_path.filename() == "a.png");
    REQUIRE(train.warnings.size() == 1);
    CHECK(train.warnings[0].find("c.png") != std::string::npos);

    // Mismatched label dimensions also exclude the item.
    write_png(root / "masks" / "rover" / "c.png", flat_image(4, 4, 1, 0));
    const auto train2 = data::load_manifest(root, data::Split::train);
    CHECK(train2.items.size() == 1);
    CHECK(train2.warnings.size() == 1);
}

TEST_CASE("manifest of an empty root warns instead of fabricating items") {
    const auto root = testing::fresh_dir("empty_corpus");
    CHECK_THROWS_AS(data::load_manifest(root, data::Split::train), DataError);
    fs::create_directories(root / "images");
    const auto m = data::load_manifest(root, data::Split::train);
    CHECK(m.items.empty());
    REQUIRE(m.warnings.size() == 1);
    CHECK(m.warnings[0].find("no usable") != std::string::npos);
}

TEST_CASE("manifest cache round-trips") {
    const auto root = tiny_corpus();
    const auto train = data::load_manifest(root, data::Split::train);
    const auto file = testing::fresh_dir("cache") / "manifest.tsv";
    data::save_manifest_cache(train, file);
    const auto back = data::load_manifest_cache(file);
    REQUIRE(back.items.size() == train.items.size());
    CHECK(back.split == train.split);
    for (size_t i = 0; i < back.items.size(); ++i) {
        CHECK(back.items[i].image_path == train.items[i].image_path);
        CHECK(back.items[i].label_path == train.items[i].label_path);
        CHECK(back.items[i].width == train.items[i].width);
    }
    CHECK_THROWS_AS(data::load_manifest_cache(file.parent_path() / "nope.tsv"), DataError);
}

TEST_CASE("load_sample merges labels and handles unlabeled items") {
    const auto root = tiny_corpus();
    const auto train = data::load_manifest(root, data::Split::train);
    const auto labeled = data::load_sample(train.items[0], 8);
    CHECK(labeled.image.shape() == std::vector<int64_t>{8, 8, 3});
    // Label file holds class 1 everywhere; the rover mask is all-zero.
    for (uint8_t l : labeled.labels) CHECK(l == data::kBedrock);

    const auto unlabeled = data::load_sample(train.items[1], 8);
    for (uint8_t l : unlabeled.labels) CHECK(l == 255);
}

TEST_CASE("subset_size rounds half up with a floor of one") {
    CHECK(data::subset_size(0.01, 16064) == 161);   // 160.64 rounds up
    CHECK(data::subset_size(0.20, 16064) == 3213);  // 3212.8 rounds up
    CHECK(data::subset_size(0.5, 5) == 3);          // 2.5 rounds half up
    CHECK(data::subset_size(1.0, 7) == 7);
    CHECK(data::subset_size(0.0001, 10) == 1);      // never empty
    CHECK_THROWS_AS(data::subset_size(0.0, 10), ConfigError);
    CHECK_THROWS_AS(data::subset_size(1.5, 10), ConfigError);
}

TEST_CASE("subsets are deterministic nested prefixes") {
    const auto m = fake_manifest(100);
    const auto s20a = data::subset(m, {.fraction = 0.2, .seed = 9});
    const auto s20b = data::subset(m, {.fraction = 0.2, .seed = 9});
    REQUIRE(s20a.items.size() == 20);
    CHECK(names(s20a) == names(s20b));
    for (size_t i = 0; i < 20; ++i)
        CHECK(s20a.items[i].image_path == s20b.items[i].image_path);

    // Same seed, larger fraction: strict superset with identical prefix.
    const auto s50 = data::subset(m, {.fraction = 0.5, .seed = 9});
    REQUIRE(s50.items.size() == 50);
    for (size_t i = 0; i < 20; ++i)
        CHECK(s50.items[i].image_path == s20a.items[i].image_path);

    // Different seed picks a different subset (overwhelmingly likely).
    const auto other = data::subset(m, {.fraction = 0.2, .seed = 10});
    CHECK(names(other) != names(s20a));

    // Full fraction is a permutation of everything.
    const auto full = data::subset(m, {.fraction = 1.0, .seed = 3});
    CHECK(full.items.size() == 100);
    CHECK(names(full) == names(m));
}

TEST_CASE("synth generation is valid, sized and seeded") {
    data::SynthConfig cfg;
    cfg.num_train = 12;
    cfg.num_test = 4;
    cfg.image_size = 64;
    cfg.seed = 5;
    const auto root = testing::fresh_dir("synth_a");
    const auto summary = data::synth_generate(cfg, root);
    CHECK(summary.at("trainImages") == 12);
    CHECK(summary.at("testImages") == 4);

    const auto train = data::load_manifest(root, data::Split::train);
    const auto test = data::load_manifest(root, data::Split::test);
    CHECK(train.items.size() == 12);
    CHECK(test.items.size() == 4);
    CHECK(train.warnings.empty());

    for (const auto& item : train.items) {
        CHECK(item.width == 64);
        CHECK(item.height == 64);
    }
    // Labels only contain merged taxonomy values.
    const auto sample = data::load_sample(test.items[0], 64);
    for (uint8_t l : sample.labels) CHECK((l < 6 || l == 255));
}

TEST_CASE("synth output is byte-identical across runs of the same config") {
    data::SynthConfig cfg;
    cfg.num_train = 6;
    cfg.num_test = 2;
    cfg.seed = 21;
    const auto a = testing::fresh_dir("synth_b1");
    const auto b = testing::fresh_dir("synth_b2");
    data::synth_generate(cfg, a);
    data::synth_generate(cfg, b);

    size_t files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (!entry.is_regular_file()) continue;
        ++files;
        const auto rel = fs::relative(entry.path(), a);
        std::ifstream fa(entry.path(), std::ios::binary);
        std::ifstream fb(b / rel, std::ios::binary);
        REQUIRE(fb.good());
        std::string ca((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
        std::string cb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
        CHECK(ca == cb);
    }
    CHECK(files > 8);

    data::SynthConfig other = cfg;
    other.seed = 22;
    const auto c = testing::fresh_dir("synth_b3");
    data::synth_generate(other, c);
    bool any_diff = false;
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), a);
        std::ifstream fa(entry.path(), std::ios::binary);
        std::ifstream fc(c / rel, std::ios::binary);
        if (!fc.good()) {
            any_diff = true;
            break;
        }
        std::string ca((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
        std::string cc((std::istreambuf_iterator<char>(fc)), std::istreambuf_iterator<char>());
        if (ca != cc) any_diff = true;
    }
    CHECK(any_diff);
}

TEST_CASE("synth respects requested class frequencies approximately") {
    data::SynthConfig cfg;
    cfg.num_train = 40;
    cfg.num_test = 8;
    cfg.seed = 33;
    const auto root = testing::fresh_dir("synth_freq");
    const auto summary = data::synth_generate(cfg, root);
    const auto shares = summary.at("terrainPixelShares");
    // bigRock is the scarce class the sweep watches; demand the requested
    // share within +-50% relative.
    const double big = shares.at("bigRock").get<double>();
    CHECK(big > 0.02 * 0.5);
    CHECK(big < 0.02 * 1.5);
    // Soil dominates.
    CHECK(shares.at("soil").get<double>() > 0.3);
}

TEST_CASE("synth config validation") {
    data::SynthConfig cfg;
    cfg.image_size = 63;  // not a multiple of 32
    CHECK_THROWS_AS(data::validate(cfg), ConfigError);
    cfg = {};
    cfg.class_frequencies = {0.5, 0.2, 0.2, 0.2};  // sums to 1.1
    CHECK_THROWS_AS(data::validate(cfg), ConfigError);
    cfg = {};
    cfg.num_train = 0;
    CHECK_THROWS_AS(data::validate(cfg), ConfigError);
}

}  // TEST_SUITE
