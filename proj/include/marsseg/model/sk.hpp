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

#include <memory>
#include <string>
#include <vector>

#include "marsseg/nn/layers.hpp"

namespace marsseg::model {

// Softmax branch weights from attention logits (B, branches, C); weights sum
// to 1 across branches for every (sample, channel) pair.
nn::Tensor sk_attention_weights(const nn::Tensor& logits);

// fused[b,h,w,c] = sum_br weights[b,br,c] * branches[br][b,h,w,c]
nn::Tensor sk_fuse(const std::vector<nn::Tensor>& branches, const nn::Tensor& weights);

// Selective-kernel convolution: a 3x3 branch and a 5x5-effective branch
// (3x3 dilated by 2), each conv+BN+ReLU, fused by per-channel attention
// computed from the pooled sum of the branches through a two-layer MLP with
// bottleneck width max(out_ch / reduction, min_width).
class SKConv : public nn::Layer {
  public:
    SKConv(std::string name, int in_ch, int out_ch, int stride, int reduction, int min_width,
           Rng& rng);

    nn::Tensor forward(const nn::Tensor& x, bool training) override;
    nn::Tensor backward(const nn::Tensor& dy) override;
    void collect_params(std::vector<nn::Param*>& out) override;
    void collect_state(std::vector<nn::NamedTensor>& out) override;

  private:
    nn::Tensor branch_forward(int br, const nn::Tensor& x, bool training);
    nn::Tensor branch_backward(int br, const nn::Tensor& dy);

    int out_ch_ = 0;
    std::unique_ptr<nn::Conv2d> conv_[2];
    std::unique_ptr<nn::BatchNorm2d> bn_[2];
    nn::ReLU relu_[2];
    nn::GlobalAvgPool gap_;
    std::unique_ptr<nn::Dense> fc1_;
    nn::ReLU fc_relu_;
    std::unique_ptr<nn::Dense> fc2_;
    nn::Tensor cached_a_, cached_b_, cached_weights_;
};

}  // namespace marsseg::model
