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
//
// Independent reference implementations used as test oracles. They share no
// code with the library: plain loops, long-double accumulation, and the
// published formulas only.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "marsseg/tensor.hpp"

namespace marsseg::testing {

// Mean NT-Xent loss over all 2N anchors, enumerated term by term:
//   l_i = -log(exp(cos(z_i, z_j)/tau) / sum_{k != i} exp(cos(z_i, z_k)/tau)).
// Rows need not be unit length; cosine handles normalization.
double oracle_nt_xent(const Tensor& embeddings, const std::vector<int>& pairing, double tau);

// Mean softmax cross-entropy over pixels with label != 255, computed
// per-pixel with a plain shifted-exponential softmax.
double oracle_masked_ce(const Tensor& logits, const std::vector<uint8_t>& labels);

// Direct seven-loop convolution, NHWC activations and (kh,kw,Cin,Cout)
// weights, zero padding, arbitrary stride/dilation.
Tensor oracle_conv2d(const Tensor& x, const Tensor& w, const std::vector<float>& bias, int stride,
                     int pad, int dilation);

// Pixel-count confusion matrix via a per-pixel double loop.
std::vector<std::vector<int64_t>> oracle_confusion(const std::vector<uint8_t>& predictions,
                                                   const std::vector<uint8_t>& labels,
                                                   int num_classes);

// Central-difference gradient of `loss` w.r.t. the tensor behind `value`.
// Probes only the given indices (all when empty).
std::vector<double> finite_difference(const std::function<double()>& loss, float* value,
                                      const std::vector<int64_t>& indices, double eps = 1e-3);

// Largest relative error max(|a-b| / max(|a|,|b|,floor)) over paired entries.
double max_rel_err(const std::vector<double>& a, const std::vector<double>& b,
                   double floor = 1e-4);

// Lazily generated shared synthetic dataset (24 train / 8 test, 64x64).
const std::filesystem::path& small_dataset();

// Scratch directory unique to this test process, cleaned up on first use.
std::filesystem::path fresh_dir(const std::string& tag);

}  // namespace marsseg::testing
