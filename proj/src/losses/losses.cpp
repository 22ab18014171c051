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

#include "marsseg/losses/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "marsseg/common.hpp"

namespace marsseg::losses {

using nn::Tensor;

void validate(const EmbeddingBatch& batch) {
    const Tensor& e = batch.embeddings;
    MSEG_CHECK(e.rank() == 2, "embedding batch: expected (2N,D), got {}", e.shape_str());
    const int64_t rows = e.dim(0);
    MSEG_CHECK(batch.num_images >= 1 && rows == 2 * batch.num_images,
               "embedding batch: {} rows for N={}", rows, batch.num_images);
    MSEG_CHECK(static_cast<int64_t>(batch.pairing.size()) == rows,
               "embedding batch: pairing size {} vs {} rows", batch.pairing.size(), rows);
    for (int64_t i = 0; i < rows; ++i) {
        const int j = batch.pairing[static_cast<size_t>(i)];
        MSEG_CHECK(j >= 0 && j < rows && j != i, "embedding batch: pairing[{}]={} invalid", i, j);
        MSEG_CHECK(batch.pairing[static_cast<size_t>(j)] == i,
                   "embedding batch: pairing not an involution at {}", i);
    }
    for (int64_t i = 0; i < rows; ++i) {
        double ss = 0.0;
        for (int64_t d = 0; d < e.dim(1); ++d) ss += static_cast<double>(e.at(i, d)) * e.at(i, d);
        // Loose on purpose: the loss renormalizes through the cosine, so this
        // only guards against grossly unnormalized (or zero) rows while still
        // admitting finite-difference probes of individual entries.
        MSEG_CHECK(std::abs(std::sqrt(ss) - 1.0) <= 1e-2, "embedding batch: row {} norm {}", i,
                   std::sqrt(ss));
    }
}

double cosine_sim(std::span<const float> a, std::span<const float> b) {
    MSEG_CHECK(a.size() == b.size() && !a.empty(), "cosine: dim mismatch {} vs {}", a.size(),
               b.size());
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na <= 0.0 || nb <= 0.0) throw Error("cosine: zero vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double nt_xent(const EmbeddingBatch& batch, const ContrastiveConfig& cfg, Tensor* grad) {
    if (cfg.temperature <= 0.0) {
        throw ConfigError(fmt::format("nt_xent: temperature {} must be > 0", cfg.temperature));
    }
    if (batch.num_images < 1) throw Error("nt_xent: empty batch");
    validate(batch);
    const Tensor& x = batch.embeddings;
    const int64_t M = x.dim(0), D = x.dim(1);
    const double tau = cfg.temperature;

    // unit rows (inputs are near-unit; renormalizing keeps gradients exact)
    std::vector<double> u(static_cast<size_t>(M * D));
    std::vector<double> norm(static_cast<size_t>(M));
    for (int64_t i = 0; i < M; ++i) {
        double ss = 0.0;
        for (int64_t d = 0; d < D; ++d) ss += static_cast<double>(x.at(i, d)) * x.at(i, d);
        norm[static_cast<size_t>(i)] = std::sqrt(ss);
        for (int64_t d = 0; d < D; ++d) {
            u[static_cast<size_t>(i * D + d)] = x.at(i, d) / norm[static_cast<size_t>(i)];
        }
    }

    std::vector<double> sim(static_cast<size_t>(M * M), 0.0);
    for (int64_t i = 0; i < M; ++i) {
        for (int64_t k = i + 1; k < M; ++k) {
            double dot = 0.0;
            for (int64_t d = 0; d < D; ++d) {
                dot += u[static_cast<size_t>(i * D + d)] * u[static_cast<size_t>(k * D + d)];
            }
            sim[static_cast<size_t>(i * M + k)] = dot;
            sim[static_cast<size_t>(k * M + i)] = dot;
        }
    }

    // dsim[i*M+k] accumulates d(total)/d(sim_{i,k}) for k != i
    std::vector<double> dsim;
    if (grad) dsim.assign(static_cast<size_t>(M * M), 0.0);

    double total = 0.0;
    for (int64_t i = 0; i < M; ++i) {
        const int j = batch.pairing[static_cast<size_t>(i)];
        double mx = -std::numeric_limits<double>::infinity();
        for (int64_t k = 0; k < M; ++k) {
            if (k != i) mx = std::max(mx, sim[static_cast<size_t>(i * M + k)] / tau);
        }
        double denom = 0.0;
        for (int64_t k = 0; k < M; ++k) {
            if (k != i) denom += std::exp(sim[static_cast<size_t>(i * M + k)] / tau - mx);
        }
        const double log_denom = mx + std::log(denom);
        total += log_denom - sim[static_cast<size_t>(i * M + j)] / tau;
        if (grad) {
            for (int64_t k = 0; k < M; ++k) {
                if (k == i) continue;
                const double p = std::exp(sim[static_cast<size_t>(i * M + k)] / tau - mx) / denom;
                dsim[static_cast<size_t>(i * M + k)] += p / tau;
            }
            dsim[static_cast<size_t>(i * M + j)] -= 1.0 / tau;
        }
    }
    const double loss = total / static_cast<double>(M);

    if (grad) {
        const double scale = 1.0 / static_cast<double>(M);
        *grad = Tensor(x.shape());
        for (int64_t i = 0; i < M; ++i) {
            // du_i = sum_k (dsim_{i,k} + dsim_{k,i}) u_k, then project through
            // the normalization of row i
            std::vector<double> du(static_cast<size_t>(D), 0.0);
            for (int64_t k = 0; k < M; ++k) {
                if (k == i) continue;
                const double g = dsim[static_cast<size_t>(i * M + k)] +
                                 dsim[static_cast<size_t>(k * M + i)];
                if (g == 0.0) continue;
                for (int64_t d = 0; d < D; ++d) {
                    du[static_cast<size_t>(d)] += g * u[static_cast<size_t>(k * D + d)];
                }
            }
            double dot = 0.0;
            for (int64_t d = 0; d < D; ++d) {
                dot += du[static_cast<size_t>(d)] * u[static_cast<size_t>(i * D + d)];
            }
            for (int64_t d = 0; d < D; ++d) {
                const double dx = (du[static_cast<size_t>(d)] -
                                   dot * u[static_cast<size_t>(i * D + d)]) /
                                  norm[static_cast<size_t>(i)];
                grad->at(i, d) = static_cast<float>(dx * scale);
            }
        }
    }
    return loss;
}

double masked_cross_entropy(const Tensor& logits, const std::vector<uint8_t>& labels,
                            const SegLossConfig& cfg, Tensor* grad) {
    MSEG_CHECK(logits.rank() == 4 && logits.dim(3) == cfg.num_classes,
               "masked_ce: logits {} vs {} classes", logits.shape_str(), cfg.num_classes);
    const int64_t P = logits.dim(0) * logits.dim(1) * logits.dim(2);
    const int C = cfg.num_classes;
    MSEG_CHECK(static_cast<int64_t>(labels.size()) == P, "masked_ce: {} labels for {} pixels",
               labels.size(), P);

    if (grad) *grad = Tensor(logits.shape());
    const float* lp = logits.data();
    double total = 0.0;
    int64_t counted = 0;
    for (int64_t p = 0; p < P; ++p) {
        const int y = labels[static_cast<size_t>(p)];
        if (y == cfg.ignore_label) continue;
        MSEG_CHECK(y >= 0 && y < C, "masked_ce: label {} outside [0,{}) at pixel {}", y, C, p);
        const float* row = lp + p * C;
        double mx = row[0];
        for (int c = 1; c < C; ++c) mx = std::max(mx, static_cast<double>(row[c]));
        double denom = 0.0;
        for (int c = 0; c < C; ++c) denom += std::exp(row[c] - mx);
        total += mx + std::log(denom) - row[y];
        ++counted;
        if (grad) {
            float* grow = grad->data() + p * C;
            for (int c = 0; c < C; ++c) {
                grow[c] = static_cast<float>(std::exp(row[c] - mx) / denom);
            }
            grow[y] -= 1.0f;
        }
    }
    if (counted == 0) throw DataError("masked_ce: batch has no labeled pixel");
    if (grad) grad->scale(1.0f / static_cast<float>(counted));
    return total / static_cast<double>(counted);
}

std::vector<double> loss_surface_sample(const std::vector<double>& s_pos,
                                        const std::vector<double>& s_neg_sum) {
    for (double v : s_pos) {
        if (v <= 0.0) throw Error(fmt::format("loss surface: nonpositive s_pos {}", v));
    }
    for (double v : s_neg_sum) {
        if (v < 0.0) throw Error(fmt::format("loss surface: negative s_neg_sum {}", v));
    }
    std::vector<double> out;
    out.reserve(s_pos.size() * s_neg_sum.size());
    for (double p : s_pos) {
        for (double n : s_neg_sum) out.push_back(-std::log(p / (p + n)));
    }
    return out;
}

}  // namespace marsseg::losses
