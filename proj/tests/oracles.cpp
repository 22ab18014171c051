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

#include "oracles.hpp"

#include <cmath>
#include <cstdlib>

#include "marsseg/data/synth.hpp"

namespace marsseg::testing {

namespace {

long double cosine(const float* a, const float* b, int64_t d) {
    long double dot = 0, na = 0, nb = 0;
    for (int64_t i = 0; i < d; ++i) {
        dot += static_cast<long double>(a[i]) * b[i];
        na += static_cast<long double>(a[i]) * a[i];
        nb += static_cast<long double>(b[i]) * b[i];
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

double oracle_nt_xent(const Tensor& embeddings, const std::vector<int>& pairing, double tau) {
    const int64_t n = embeddings.shape()[0];
    const int64_t d = embeddings.shape()[1];
    const float* e = embeddings.data();
    long double total = 0;
    for (int64_t i = 0; i < n; ++i) {
        const int64_t j = pairing[static_cast<size_t>(i)];
        const long double num = std::exp(cosine(e + i * d, e + j * d, d) / tau);
        long double den = 0;
        for (int64_t k = 0; k < n; ++k) {
            if (k == i) continue;
            den += std::exp(cosine(e + i * d, e + k * d, d) / tau);
        }
        total += -std::log(num / den);
    }
    return static_cast<double>(total / n);
}

double oracle_masked_ce(const Tensor& logits, const std::vector<uint8_t>& labels) {
    const auto& s = logits.shape();
    const int64_t pixels = s[0] * s[1] * s[2];
    const int64_t classes = s[3];
    const float* v = logits.data();
    long double total = 0;
    int64_t counted = 0;
    for (int64_t p = 0; p < pixels; ++p) {
        const uint8_t label = labels[static_cast<size_t>(p)];
        if (label == 255) continue;
        const float* row = v + p * classes;
        long double mx = row[0];
        for (int64_t c = 1; c < classes; ++c) mx = std::max<long double>(mx, row[c]);
        long double denom = 0;
        for (int64_t c = 0; c < classes; ++c) denom += std::exp(row[c] - mx);
        total += -(static_cast<long double>(row[label]) - mx - std::log(denom));
        ++counted;
    }
    return static_cast<double>(total / counted);
}

Tensor oracle_conv2d(const Tensor& x, const Tensor& w, const std::vector<float>& bias, int stride,
                     int pad, int dilation) {
    const int64_t B = x.shape()[0], H = x.shape()[1], W = x.shape()[2], Ci = x.shape()[3];
    const int64_t kh = w.shape()[0], kw = w.shape()[1], Co = w.shape()[3];
    const int64_t Ho = (H + 2 * pad - dilation * (kh - 1) - 1) / stride + 1;
    const int64_t Wo = (W + 2 * pad - dilation * (kw - 1) - 1) / stride + 1;
    Tensor y({B, Ho, Wo, Co});
    for (int64_t b = 0; b < B; ++b)
        for (int64_t oy = 0; oy < Ho; ++oy)
            for (int64_t ox = 0; ox < Wo; ++ox)
                for (int64_t co = 0; co < Co; ++co) {
                    long double acc = bias.empty() ? 0.0L : bias[static_cast<size_t>(co)];
                    for (int64_t ky = 0; ky < kh; ++ky)
                        for (int64_t kx = 0; kx < kw; ++kx) {
                            const int64_t iy = oy * stride - pad + ky * dilation;
                            const int64_t ix = ox * stride - pad + kx * dilation;
                            if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue;
                            for (int64_t ci = 0; ci < Ci; ++ci)
                                acc += static_cast<long double>(x.at(b, iy, ix, ci)) *
                                       w.at(ky, kx, ci, co);
                        }
                    y.at(b, oy, ox, co) = static_cast<float>(acc);
                }
    return y;
}

std::vector<std::vector<int64_t>> oracle_confusion(const std::vector<uint8_t>& predictions,
                                                   const std::vector<uint8_t>& labels,
                                                   int num_classes) {
    std::vector<std::vector<int64_t>> cm(static_cast<size_t>(num_classes),
                                         std::vector<int64_t>(static_cast<size_t>(num_classes)));
    for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 255) continue;
        ++cm[labels[i]][predictions[i]];
    }
    return cm;
}

std::vector<double> finite_difference(const std::function<double()>& loss, float* value,
                                      const std::vector<int64_t>& indices, double eps) {
    std::vector<double> grads;
    grads.reserve(indices.size());
    for (int64_t idx : indices) {
        const float saved = value[idx];
        value[idx] = static_cast<float>(saved + eps);
        const double up = loss();
        value[idx] = static_cast<float>(saved - eps);
        const double down = loss();
        value[idx] = saved;
        grads.push_back((up - down) / (2.0 * eps));
    }
    return grads;
}

double max_rel_err(const std::vector<double>& a, const std::vector<double>& b, double floor) {
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({std::abs(a[i]), std::abs(b[i]), floor});
        worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
    }
    return worst;
}

std::filesystem::path fresh_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("marsseg_test_" + std::to_string(::getpid())) / tag;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

const std::filesystem::path& small_dataset() {
    static const std::filesystem::path root = [] {
        const auto dir = fresh_dir("shared_dataset");
        data::SynthConfig cfg;
        cfg.num_train = 24;
        cfg.num_test = 8;
        cfg.image_size = 64;
        cfg.seed = 11;
        data::synth_generate(cfg, dir);
        return dir;
    }();
    return root;
}

}  // namespace marsseg::testing
