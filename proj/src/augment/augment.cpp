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

#include "marsseg/augment/augment.hpp"

#include <algorithm>
#include <cmath>

#include "marsseg/common.hpp"
#include "marsseg/nn/layers.hpp"
#include "marsseg/rng.hpp"

namespace marsseg::augment {

using nn::Tensor;

void validate(const AugmentConfig& cfg) {
    if (!(cfg.crop_scale_min > 0.0 && cfg.crop_scale_min <= cfg.crop_scale_max &&
          cfg.crop_scale_max <= 1.0)) {
        throw ConfigError(fmt::format("augment: cropScaleRange ({},{}) not within (0,1]",
                                      cfg.crop_scale_min, cfg.crop_scale_max));
    }
    if (cfg.color_jitter_strength < 0.0 || cfg.color_jitter_strength >= 1.0) {
        throw ConfigError("augment: colorJitterStrength outside [0,1)");
    }
    if (cfg.blur_probability < 0.0 || cfg.blur_probability > 1.0) {
        throw ConfigError("augment: blurProbability outside [0,1]");
    }
    if (!(cfg.blur_sigma_min > 0.0 && cfg.blur_sigma_min <= cfg.blur_sigma_max)) {
        throw ConfigError("augment: blurSigmaRange must be positive and ordered");
    }
    if (cfg.output_size < 1) throw ConfigError("augment: outputSize must be >= 1");
}

void to_json(nlohmann::json& j, const AugmentConfig& cfg) {
    j = nlohmann::json{{"cropScaleRange", {cfg.crop_scale_min, cfg.crop_scale_max}},
                       {"colorJitterStrength", cfg.color_jitter_strength},
                       {"blurProbability", cfg.blur_probability},
                       {"blurSigmaRange", {cfg.blur_sigma_min, cfg.blur_sigma_max}},
                       {"outputSize", cfg.output_size}};
}

void from_json(const nlohmann::json& j, AugmentConfig& cfg) {
    AugmentConfig d;
    if (j.contains("cropScaleRange")) {
        auto r = j.at("cropScaleRange");
        MSEG_CHECK(r.is_array() && r.size() == 2, "augment: cropScaleRange must be [min,max]");
        cfg.crop_scale_min = r[0].get<double>();
        cfg.crop_scale_max = r[1].get<double>();
    } else {
        cfg.crop_scale_min = d.crop_scale_min;
        cfg.crop_scale_max = d.crop_scale_max;
    }
    cfg.color_jitter_strength = j.value("colorJitterStrength", d.color_jitter_strength);
    cfg.blur_probability = j.value("blurProbability", d.blur_probability);
    if (j.contains("blurSigmaRange")) {
        auto r = j.at("blurSigmaRange");
        MSEG_CHECK(r.is_array() && r.size() == 2, "augment: blurSigmaRange must be [min,max]");
        cfg.blur_sigma_min = r[0].get<double>();
        cfg.blur_sigma_max = r[1].get<double>();
    } else {
        cfg.blur_sigma_min = d.blur_sigma_min;
        cfg.blur_sigma_max = d.blur_sigma_max;
    }
    cfg.output_size = j.value("outputSize", d.output_size);
}

namespace {

Tensor crop_region(const Tensor& image, int y0, int x0, int h, int w) {
    const int64_t W = image.dim(1), C = image.dim(2);
    Tensor out({h, w, C});
    for (int y = 0; y < h; ++y) {
        const float* src = image.data() + ((y0 + y) * W + x0) * C;
        std::copy(src, src + static_cast<int64_t>(w) * C, out.data() + static_cast<int64_t>(y) * w * C);
    }
    return out;
}

Tensor gaussian_blur(const Tensor& image, double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(2.0 * sigma)));
    std::vector<float> kernel(static_cast<size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        kernel[static_cast<size_t>(i + radius)] = static_cast<float>(v);
        sum += v;
    }
    for (float& k : kernel) k = static_cast<float>(k / sum);

    const int64_t H = image.dim(0), W = image.dim(1), C = image.dim(2);
    auto clampi = [](int64_t v, int64_t hi) { return std::clamp<int64_t>(v, 0, hi - 1); };
    Tensor tmp(image.shape()), out(image.shape());
    for (int64_t y = 0; y < H; ++y) {
        for (int64_t x = 0; x < W; ++x) {
            for (int64_t c = 0; c < C; ++c) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) {
                    acc += kernel[static_cast<size_t>(i + radius)] *
                           image.at(y, clampi(x + i, W), c);
                }
                tmp.at(y, x, c) = static_cast<float>(acc);
            }
        }
    }
    for (int64_t y = 0; y < H; ++y) {
        for (int64_t x = 0; x < W; ++x) {
            for (int64_t c = 0; c < C; ++c) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) {
                    acc += kernel[static_cast<size_t>(i + radius)] *
                           tmp.at(clampi(y + i, H), x, c);
                }
                out.at(y, x, c) = static_cast<float>(acc);
            }
        }
    }
    return out;
}

}  // namespace

Tensor augment_view(const Tensor& image, const AugmentConfig& cfg, uint64_t seed) {
    validate(cfg);
    MSEG_CHECK(image.rank() == 3 && image.dim(2) == 3, "augment: expected (H,W,3), got {}",
               image.shape_str());
    const int64_t H = image.dim(0), W = image.dim(1);
    Rng rng(seed);

    // random resized crop: sample an area fraction and aspect ratio; a full
    // scale draw keeps the whole frame so the identity config is exact
    const double scale =
        cfg.crop_scale_min + rng.uniform() * (cfg.crop_scale_max - cfg.crop_scale_min);
    int cw = static_cast<int>(W), ch = static_cast<int>(H);
    if (scale < 1.0 - 1e-12) {
        const double aspect = std::exp(std::log(0.75) + rng.uniform() * (std::log(4.0 / 3.0) -
                                                                         std::log(0.75)));
        const double target_area = scale * static_cast<double>(H) * static_cast<double>(W);
        cw = std::clamp<int>(static_cast<int>(std::lround(std::sqrt(target_area * aspect))), 1,
                             static_cast<int>(W));
        ch = std::clamp<int>(static_cast<int>(std::lround(std::sqrt(target_area / aspect))), 1,
                             static_cast<int>(H));
    }
    const int y0 = static_cast<int>(rng.below(static_cast<uint64_t>(H - ch + 1)));
    const int x0 = static_cast<int>(rng.below(static_cast<uint64_t>(W - cw + 1)));
    Tensor view = crop_region(image, y0, x0, ch, cw);

    view.reshape({1, ch, cw, 3});
    view = nn::bilinear_resize(view, cfg.output_size, cfg.output_size);
    view.reshape({cfg.output_size, cfg.output_size, 3});

    // luminance-only jitter: brightness then contrast about the mean
    const double js = cfg.color_jitter_strength;
    const float brightness = static_cast<float>(1.0 + (2.0 * rng.uniform() - 1.0) * js);
    const float contrast = static_cast<float>(1.0 + (2.0 * rng.uniform() - 1.0) * js);
    double mean = 0.0;
    for (int64_t i = 0; i < view.size(); ++i) {
        view[i] *= brightness;
        mean += view[i];
    }
    mean /= static_cast<double>(view.size());
    for (int64_t i = 0; i < view.size(); ++i) {
        view[i] = static_cast<float>(mean + (view[i] - mean) * contrast);
    }

    if (rng.uniform() < cfg.blur_probability) {
        const double sigma =
            cfg.blur_sigma_min + rng.uniform() * (cfg.blur_sigma_max - cfg.blur_sigma_min);
        view = gaussian_blur(view, sigma);
    }

    for (int64_t i = 0; i < view.size(); ++i) view[i] = std::clamp(view[i], 0.0f, 1.0f);
    return view;
}

std::pair<Tensor, Tensor> augment_pair(const Tensor& image, const AugmentConfig& cfg,
                                       uint64_t seed) {
    return {augment_view(image, cfg, derive_seed(seed, 1)),
            augment_view(image, cfg, derive_seed(seed, 2))};
}

}  // namespace marsseg::augment
