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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "marsseg/tensor.hpp"

namespace marsseg::losses {

// 2N projection vectors with view-pair bookkeeping: row i and row pairing[i]
// are the two augmented views of the same image.
struct EmbeddingBatch {
    nn::Tensor embeddings;      // (2N, D), unit rows
    std::vector<int> pairing;   // involution without fixed points
    int num_images = 0;         // N
};

void validate(const EmbeddingBatch& batch);

struct ContrastiveConfig {
    double temperature = 0.1;
};

struct SegLossConfig {
    int ignore_label = 255;
    int num_classes = 6;
};

double cosine_sim(std::span<const float> a, std::span<const float> b);

// Normalized-temperature cross-entropy over all 2N anchors:
//   l_i = -log(S_{i,j(i)} / sum_{k != i} S_{i,k}),  S_{i,k} = exp(sim_i_k / tau)
// returned as the mean of l over anchors. When grad is non-null it receives
// d(loss)/d(embeddings), exact through the cosine normalization.
double nt_xent(const EmbeddingBatch& batch, const ContrastiveConfig& cfg,
               nn::Tensor* grad = nullptr);

// Softmax cross-entropy averaged over pixels whose label differs from
// ignoreLabel; the gradient at ignored pixels is exactly zero. labels is
// (B,H,W) row-major, matching logits (B,H,W,numClasses). Throws when the
// batch has no labeled pixel.
double masked_cross_entropy(const nn::Tensor& logits, const std::vector<uint8_t>& labels,
                            const SegLossConfig& cfg, nn::Tensor* grad = nullptr);

// l = -log(s_pos / (s_pos + s_neg_sum)) over the cartesian grid, row-major
// with s_pos varying along rows. s_pos must be positive, s_neg_sum
// nonnegative (a zero negative mass gives l = 0).
std::vector<double> loss_surface_sample(const std::vector<double>& s_pos,
                                        const std::vector<double>& s_neg_sum);

}  // namespace marsseg::losses
