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

#include "marsseg/model/config.hpp"
#include "marsseg/model/sk.hpp"
#include "marsseg/nn/layers.hpp"

namespace marsseg::model {

// Bottleneck residual block (1x1 reduce, 3x3 or SK, 1x1 expand x4) with an
// optional projection shortcut when the shape changes.
class Bottleneck : public nn::Layer {
  public:
    Bottleneck(std::string name, int in_ch, int width, int stride, bool use_sk, int sk_reduction,
               int sk_min_width, Rng& rng);

    nn::Tensor forward(const nn::Tensor& x, bool training) override;
    nn::Tensor backward(const nn::Tensor& dy) override;
    void collect_params(std::vector<nn::Param*>& out) override;
    void collect_state(std::vector<nn::NamedTensor>& out) override;

    int out_channels() const { return out_ch_; }

  private:
    int out_ch_ = 0;
    std::unique_ptr<nn::Conv2d> conv1_;
    std::unique_ptr<nn::BatchNorm2d> bn1_;
    nn::ReLU relu1_;
    std::unique_ptr<nn::Conv2d> conv2_;       // plain 3x3 path
    std::unique_ptr<nn::BatchNorm2d> bn2_;
    nn::ReLU relu2_;
    std::unique_ptr<SKConv> sk_;              // selective-kernel path
    std::unique_ptr<nn::Conv2d> conv3_;
    std::unique_ptr<nn::BatchNorm2d> bn3_;
    std::unique_ptr<nn::Conv2d> proj_conv_;   // shortcut projection, if any
    std::unique_ptr<nn::BatchNorm2d> proj_bn_;
    nn::ReLU relu_out_;
};

// Stem (7x7/2 conv + BN + ReLU + 3x3/2 maxpool) followed by bottleneck
// stages; the first block of every stage past the first downsamples by 2.
class Encoder : public nn::Layer {
  public:
    Encoder(const EncoderConfig& cfg, Rng& rng);

    nn::Tensor forward(const nn::Tensor& x, bool training) override;
    nn::Tensor backward(const nn::Tensor& dy) override;
    void collect_params(std::vector<nn::Param*>& out) override;
    void collect_state(std::vector<nn::NamedTensor>& out) override;

    int out_channels() const { return out_ch_; }
    int output_stride() const { return stride_; }

  private:
    int out_ch_ = 0;
    int stride_ = 0;
    std::unique_ptr<nn::Conv2d> stem_conv_;
    std::unique_ptr<nn::BatchNorm2d> stem_bn_;
    nn::ReLU stem_relu_;
    nn::MaxPool2d stem_pool_{3, 2, 1};
    std::vector<std::unique_ptr<Bottleneck>> blocks_;
};

}  // namespace marsseg::model
