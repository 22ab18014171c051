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

#include "marsseg/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "marsseg/common.hpp"
#include "marsseg/data/taxonomy.hpp"
#include "marsseg/image.hpp"
#include "marsseg/rng.hpp"

namespace marsseg::data {

namespace fs = std::filesystem;

void validate(const SynthConfig& cfg) {
    if (cfg.num_train < 1) throw ConfigError("synth: numTrain must be >= 1");
    if (cfg.num_test < 0) throw ConfigError("synth: numTest must be >= 0");
    if (cfg.image_size < 32 || cfg.image_size % 32 != 0) {
        throw ConfigError(fmt::format("synth: imageSize {} must be a positive multiple of 32",
                                      cfg.image_size));
    }
    double sum = 0.0;
    for (double f : cfg.class_frequencies) {
        if (f < 0.0) throw ConfigError("synth: negative class frequency");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError(fmt::format("synth: classFrequencies sum {} != 1", sum));
    }
    if (cfg.color_fraction < 0.0 || cfg.color_fraction > 1.0) {
        throw ConfigError("synth: colorFraction outside [0,1]");
    }
}

void to_json(nlohmann::json& j, const SynthConfig& cfg) {
    j = nlohmann::json{{"numTrain", cfg.num_train},
                       {"numTest", cfg.num_test},
                       {"imageSize", cfg.image_size},
                       {"seed", cfg.seed},
                       {"classFrequencies", cfg.class_frequencies},
                       {"colorFraction", cfg.color_fraction}};
}

void from_json(const nlohmann::json& j, SynthConfig& cfg) {
    SynthConfig d;
    cfg.num_train = j.value("numTrain", d.num_train);
    cfg.num_test = j.value("numTest", d.num_test);
    cfg.image_size = j.value("imageSize", d.image_size);
    cfg.seed = j.value("seed", d.seed);
    if (j.contains("classFrequencies")) {
        auto f = j.at("classFrequencies");
        MSEG_CHECK(f.is_array() && f.size() == 4, "synth: classFrequencies must have 4 entries");
        for (size_t i = 0; i < 4; ++i) cfg.class_frequencies[i] = f[i].get<double>();
    } else {
        cfg.class_frequencies = d.class_frequencies;
    }
    cfg.color_fraction = j.value("colorFraction", d.color_fraction);
}

namespace {

constexpr double kPi = std::numbers::pi;

// Bilinearly interpolated lattice of uniform randoms.
class ValueNoise {
  public:
    ValueNoise(Rng& rng, int cells) : cells_(cells), lattice_((cells + 1) * (cells + 1)) {
        for (float& v : lattice_) v = static_cast<float>(rng.uniform());
    }

    float at(double u, double v) const {
        const double x = std::clamp(u, 0.0, 1.0) * cells_;
        const double y = std::clamp(v, 0.0, 1.0) * cells_;
        const int x0 = std::min(static_cast<int>(x), cells_ - 1);
        const int y0 = std::min(static_cast<int>(y), cells_ - 1);
        const double fx = x - x0, fy = y - y0;
        auto l = [&](int yy, int xx) { return lattice_[static_cast<size_t>(yy * (cells_ + 1) + xx)]; };
        return static_cast<float>((1 - fy) * ((1 - fx) * l(y0, x0) + fx * l(y0, x0 + 1)) +
                                  fy * ((1 - fx) * l(y0 + 1, x0) + fx * l(y0 + 1, x0 + 1)));
    }

  private:
    int cells_;
    std::vector<float> lattice_;
};

void paint_ellipse(std::vector<uint8_t>& labels, int S, double cx, double cy, double a, double b,
                   double theta, uint8_t value, bool protect_bigrock) {
    const double ct = std::cos(theta), st = std::sin(theta);
    const double r = std::max(a, b);
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - r)));
    const int y1 = std::min(S - 1, static_cast<int>(std::ceil(cy + r)));
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - r)));
    const int x1 = std::min(S - 1, static_cast<int>(std::ceil(cx + r)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dx = x - cx, dy = y - cy;
            const double ex = (dx * ct + dy * st) / a;
            const double ey = (-dx * st + dy * ct) / b;
            if (ex * ex + ey * ey <= 1.0) {
                uint8_t& cell = labels[static_cast<size_t>(y * S + x)];
                if (protect_bigrock && cell == kBigRock) continue;
                cell = value;
            }
        }
    }
}

int64_t count_value(const std::vector<uint8_t>& labels, uint8_t v) {
    return std::count(labels.begin(), labels.end(), v);
}

// Paints random blobs of `value` until its pixel count reaches quota; blob
// size shrinks as the remaining quota does, bounding the overshoot.
void paint_to_quota(std::vector<uint8_t>& labels, int S, Rng& rng, uint8_t value, int64_t quota,
                    double max_axis) {
    for (int iter = 0; iter < 500; ++iter) {
        const int64_t remaining = quota - count_value(labels, value);
        if (remaining <= 0) return;
        const double fit = std::sqrt(static_cast<double>(remaining) / kPi) * 1.3 + 1.0;
        const double hi = std::min(max_axis, fit);
        const double lo = std::max(1.0, hi * 0.5);
        const double a = lo + rng.uniform() * (hi - lo);
        const double b = lo + rng.uniform() * (hi - lo);
        const double cx = rng.uniform() * S, cy = rng.uniform() * S;
        const double theta = rng.uniform() * kPi;
        paint_ellipse(labels, S, cx, cy, a, b, theta, value, value != kBigRock);
    }
}

struct GeneratedItem {
    ImageU8 image;
    ImageU8 terrain;  // values {0..3, 255}
    ImageU8 rover;    // binary, may be empty (not emitted)
    ImageU8 range;    // binary
};

GeneratedItem generate_item(const SynthConfig& cfg, uint64_t item_seed) {
    const int S = cfg.image_size;
    const int64_t area = static_cast<int64_t>(S) * S;
    Rng rng(item_seed);
    const bool color = rng.uniform() < cfg.color_fraction;
    const bool with_rover = rng.uniform() < 0.8;
    const bool with_null = rng.uniform() < 0.6;

    // terrain labels: soil base, optional null blob, quota-painted classes
    std::vector<uint8_t> terrain(static_cast<size_t>(area), kSoil);
    if (with_null) {
        paint_ellipse(terrain, S, rng.uniform() * S, rng.uniform() * S, S / 9.0 + rng.uniform() * S / 9.0,
                      S / 9.0 + rng.uniform() * S / 9.0, rng.uniform() * kPi, kNullLabel, false);
    }
    paint_to_quota(terrain, S, rng, kBedrock,
                   static_cast<int64_t>(cfg.class_frequencies[kBedrock] * static_cast<double>(area)),
                   S / 4.0);
    paint_to_quota(terrain, S, rng, kSand,
                   static_cast<int64_t>(cfg.class_frequencies[kSand] * static_cast<double>(area)),
                   S / 4.0);
    paint_to_quota(terrain, S, rng, kBigRock,
                   static_cast<int64_t>(cfg.class_frequencies[kBigRock] * static_cast<double>(area)),
                   S / 16.0);

    // range: top band down to a jittered horizon
    const int horizon = static_cast<int>(std::lround(S * (0.12 + rng.uniform() * 0.13)));
    ImageU8 range;
    range.width = S;
    range.height = S;
    range.channels = 1;
    range.pixels.assign(static_cast<size_t>(area), 0);
    for (int y = 0; y < horizon; ++y) {
        std::fill_n(range.pixels.begin() + static_cast<size_t>(y) * S, S, uint8_t{255});
    }

    // rover silhouette: bottom-center body plus a mast
    ImageU8 rover;
    if (with_rover) {
        rover.width = S;
        rover.height = S;
        rover.channels = 1;
        rover.pixels.assign(static_cast<size_t>(area), 0);
        const int bw = static_cast<int>(std::lround(S * (0.35 + rng.uniform() * 0.15)));
        const int bh = static_cast<int>(std::lround(S * (0.12 + rng.uniform() * 0.08)));
        const int bx = std::clamp(static_cast<int>(std::lround((S - bw) / 2.0 +
                                                               (rng.uniform() - 0.5) * S / 5.0)),
                                  0, S - bw);
        for (int y = S - bh; y < S; ++y) {
            for (int x = bx; x < bx + bw; ++x) rover.pixels[static_cast<size_t>(y * S + x)] = 255;
        }
        const int mw = std::max(1, S / 24);
        const int mh = static_cast<int>(std::lround(S * (0.15 + rng.uniform() * 0.1)));
        const int mx = std::clamp(bx + bw / 2 + static_cast<int>((rng.uniform() - 0.5) * bw / 2),
                                  0, S - mw);
        for (int y = std::max(0, S - bh - mh); y < S - bh; ++y) {
            for (int x = mx; x < mx + mw; ++x) rover.pixels[static_cast<size_t>(y * S + x)] = 255;
        }
    }

    // textures: one family per class so the segmentation task is learnable
    ValueNoise coarse(rng, 8), fine(rng, 16);
    ImageU8 image;
    image.width = S;
    image.height = S;
    image.channels = color ? 3 : 1;
    image.pixels.assign(static_cast<size_t>(area) * image.channels, 0);
    for (int y = 0; y < S; ++y) {
        for (int x = 0; x < S; ++x) {
            const size_t p = static_cast<size_t>(y * S + x);
            const double u = (x + 0.5) / S, v = (y + 0.5) / S;
            double g;
            if (with_rover && rover.pixels[p] > 0) {
                g = 0.10 + 0.06 * v;
            } else if (range.pixels[p] > 0) {
                g = 0.92 - 1.4 * v;
            } else {
                switch (terrain[p]) {
                    case kBedrock:
                        g = 0.52 + 0.17 * std::sin(2 * kPi * (v * 5.0 + 1.2 * coarse.at(u, v)));
                        break;
                    case kSand:
                        g = 0.58 + 0.14 * std::sin(2 * kPi * ((u + v) * 9.0 + 0.3 * fine.at(u, v)));
                        break;
                    case kBigRock:
                        g = 0.78 + 0.36 * (fine.at(u, v) - 0.5);
                        break;
                    case kNullLabel:
                        g = 0.40 + 0.24 * (coarse.at(u, v) - 0.5);
                        break;
                    default:  // soil
                        g = 0.45 + 0.24 * (coarse.at(u, v) - 0.5);
                        break;
                }
            }
            g += rng.normal(0.0, 0.02);
            g = std::clamp(g, 0.0, 1.0);
            if (color) {
                image.pixels[p * 3 + 0] = static_cast<uint8_t>(std::lround(std::min(1.0, g * 1.15) * 255));
                image.pixels[p * 3 + 1] = static_cast<uint8_t>(std::lround(g * 0.85 * 255));
                image.pixels[p * 3 + 2] = static_cast<uint8_t>(std::lround(g * 0.6 * 255));
            } else {
                image.pixels[p] = static_cast<uint8_t>(std::lround(g * 255));
            }
        }
    }

    GeneratedItem item;
    item.image = std::move(image);
    item.terrain.width = S;
    item.terrain.height = S;
    item.terrain.channels = 1;
    item.terrain.pixels = std::move(terrain);
    item.rover = std::move(rover);
    item.range = std::move(range);
    return item;
}

}  // namespace

nlohmann::json synth_generate(const SynthConfig& cfg, const fs::path& root) {
    validate(cfg);
    fs::create_directories(root / "images");
    fs::create_directories(root / "labels" / "train");
    fs::create_directories(root / "labels" / "test");
    fs::create_directories(root / "masks" / "rover");
    fs::create_directories(root / "masks" / "range");

    std::array<int64_t, 4> class_pixels{};
    int64_t total_pixels = 0;
    for (int split = 0; split < 2; ++split) {
        const int count = split == 0 ? cfg.num_train : cfg.num_test;
        const char* split_dir = split == 0 ? "train" : "test";
        for (int i = 0; i < count; ++i) {
            GeneratedItem item = generate_item(cfg, derive_seed(cfg.seed, split + 1, i));
            const std::string name = fmt::format("synth_{}_{:04d}.png", split_dir, i);
            write_png(root / "images" / name, item.image);
            write_png(root / "labels" / split_dir / name, item.terrain);
            if (!item.rover.pixels.empty()) write_png(root / "masks" / "rover" / name, item.rover);
            write_png(root / "masks" / "range" / name, item.range);
            for (uint8_t v : item.terrain.pixels) {
                if (v < 4) ++class_pixels[v];
            }
            total_pixels += static_cast<int64_t>(item.terrain.pixels.size());
        }
    }

    nlohmann::json shares;
    for (int c = 0; c < 4; ++c) {
        shares[std::string(class_name(c))] =
            static_cast<double>(class_pixels[c]) / static_cast<double>(total_pixels);
    }
    return nlohmann::json{{"trainImages", cfg.num_train},
                          {"testImages", cfg.num_test},
                          {"imageSize", cfg.image_size},
                          {"terrainPixelShares", shares}};
}

}  // namespace marsseg::data
