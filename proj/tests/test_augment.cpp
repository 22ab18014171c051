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

#include <cmath>

#include <doctest.h>

#include "marsseg/augment/augment.hpp"
#include "marsseg/common.hpp"
#include "marsseg/rng.hpp"
#include "oracles.hpp"

using namespace marsseg;
using marsseg::nn::Tensor;

namespace {

Tensor gradient_image(int size) {
    Tensor img({size, size, 3});
    for (int64_t y = 0; y < size; ++y)
        for (int64_t x = 0; x < size; ++x)
            for (int64_t c = 0; c < 3; ++c)
                img.at(y, x, c) = static_cast<float>((y * size + x) % 97) / 96.0f;
    return img;
}

// Chain with every stochastic stage forced to identity.
augment::AugmentConfig identity_config(int size) {
    augment::AugmentConfig cfg;
    cfg.crop_scale_min = 1.0;
    cfg.crop_scale_max = 1.0;
    cfg.color_jitter_strength = 0.0;
    cfg.blur_probability = 0.0;
    cfg.output_size = size;
    return cfg;
}

}  // namespace

TEST_SUITE("augment") {

TEST_CASE("identity chain reproduces the resized source") {
    const auto img = gradient_image(32);
    auto cfg = identity_config(32);
    const auto view = augment::augment_view(img, cfg, 5);
    REQUIRE(view.shape() == img.shape());
    for (int64_t i = 0; i < img.size(); ++i)
        CHECK(view[i] == doctest::Approx(img[i]).epsilon(1e-6));

    // Identity chain at a different output size is exactly a resize.
    cfg.output_size = 16;
    const auto small = augment::augment_view(img, cfg, 5);
    CHECK(small.shape() == std::vector<int64_t>{16, 16, 3});
}

TEST_CASE("same seed gives identical views, different seeds diverge") {
    const auto img = gradient_image(40);
    augment::AugmentConfig cfg;
    cfg.output_size = 24;
    const auto a = augment::augment_view(img, cfg, 77);
    const auto b = augment::augment_view(img, cfg, 77);
    CHECK(a.storage() == b.storage());

    const auto [v1, v2] = augment::augment_pair(img, cfg, 9);
    const auto [w1, w2] = augment::augment_pair(img, cfg, 9);
    CHECK(v1.storage() == w1.storage());
    CHECK(v2.storage() == w2.storage());
    CHECK(v1.storage() != v2.storage());  // the two views must be sampled independently
}

TEST_CASE("default chain produces distinct views for almost every seed") {
    const auto img = gradient_image(48);
    augment::AugmentConfig cfg;
    cfg.output_size = 32;
    int distinct = 0;
    const int n = 100;
    for (int i = 0; i < n; ++i) {
        const auto [a, b] = augment::augment_pair(img, cfg, static_cast<uint64_t>(i));
        if (a.storage() != b.storage()) ++distinct;
    }
    CHECK(distinct >= 99);
}

TEST_CASE("views stay in unit range under extreme jitter") {
    const auto img = gradient_image(32);
    augment::AugmentConfig cfg;
    cfg.output_size = 32;
    cfg.color_jitter_strength = 0.99;
    cfg.blur_probability = 1.0;
    for (uint64_t seed = 0; seed < 25; ++seed) {
        const auto view = augment::augment_view(img, cfg, seed);
        for (int64_t i = 0; i < view.size(); ++i) {
            CHECK(view[i] >= 0.0f);
            CHECK(view[i] <= 1.0f);
        }
    }
}

TEST_CASE("augmentation does not mutate the source") {
    const auto img = gradient_image(24);
    const auto copy = img.storage();
    augment::AugmentConfig cfg;
    cfg.output_size = 24;
    (void)augment::augment_pair(img, cfg, 3);
    CHECK(img.storage() == copy);
}

TEST_CASE("config validation and json round-trip") {
    augment::AugmentConfig cfg;
    cfg.crop_scale_min = 0.0;
    CHECK_THROWS_AS(augment::validate(cfg), ConfigError);
    cfg = {};
    cfg.crop_scale_min = 0.9;
    cfg.crop_scale_max = 0.5;  // min > max
    CHECK_THROWS_AS(augment::validate(cfg), ConfigError);
    cfg = {};
    cfg.blur_probability = 1.5;
    CHECK_THROWS_AS(augment::validate(cfg), ConfigError);

    cfg = {};
    cfg.crop_scale_min = 0.4;
    cfg.output_size = 96;
    nlohmann::json j = cfg;
    CHECK(j.at("cropScaleRange") == nlohmann::json({0.4, 1.0}));
    auto back = j.get<augment::AugmentConfig>();
    CHECK(back.crop_scale_min == cfg.crop_scale_min);
    CHECK(back.output_size == 96);
}

}  // TEST_SUITE
