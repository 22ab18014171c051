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

#include "marsseg/model/encoder.hpp"

#include "marsseg/common.hpp"

namespace marsseg::model {

using nn::Tensor;

Bottleneck::Bottleneck(std::string name, int in_ch, int width, int stride, bool use_sk,
                       int sk_reduction, int sk_min_width, Rng& rng)
    : out_ch_(width * 4) {
    conv1_ = std::make_unique<nn::Conv2d>(name + ".conv1", in_ch, width, 1, 1, 0, 1, false, rng);
    bn1_ = std::make_unique<nn::BatchNorm2d>(name + ".bn1", width);
    if (use_sk) {
        sk_ = std::make_unique<SKConv>(name + ".sk", width, width, stride, sk_reduction,
                                       sk_min_width, rng);
    } else {
        conv2_ =
            std::make_unique<nn::Conv2d>(name + ".conv2", width, width, 3, stride, 1, 1, false, rng);
        bn2_ = std::make_unique<nn::BatchNorm2d>(name + ".bn2", width);
    }
    conv3_ = std::make_unique<nn::Conv2d>(name + ".conv3", width, out_ch_, 1, 1, 0, 1, false, rng);
    bn3_ = std::make_unique<nn::BatchNorm2d>(name + ".bn3", out_ch_);
    if (stride != 1 || in_ch != out_ch_) {
        proj_conv_ = std::make_unique<nn::Conv2d>(name + ".proj", in_ch, out_ch_, 1, stride, 0, 1,
                                                  false, rng);
        proj_bn_ = std::make_unique<nn::BatchNorm2d>(name + ".proj_bn", out_ch_);
    }
}

Tensor Bottleneck::forward(const Tensor& x, bool training) {
    Tensor h = relu1_.forward(bn1_->forward(conv1_->forward(x, training), training), training);
    if (sk_) {
        h = sk_->forward(h, training);
    } else {
        h = relu2_.forward(bn2_->forward(conv2_->forward(h, training), training), training);
    }
    h = bn3_->forward(conv3_->forward(h, training), training);
    Tensor skip;
    if (proj_conv_) {
        skip = proj_bn_->forward(proj_conv_->forward(x, training), training);
    } else {
        skip = x;
    }
    MSEG_CHECK(h.shape() == skip.shape(), "bottleneck: main {} vs shortcut {}", h.shape_str(),
               skip.shape_str());
    h.add_scaled(skip, 1.0f);
    return relu_out_.forward(h, training);
}

Tensor Bottleneck::backward(const Tensor& dy) {
    Tensor dsum = relu_out_.backward(dy);
    Tensor dx_skip;
    if (proj_conv_) {
        dx_skip = proj_conv_->backward(proj_bn_->backward(dsum));
    } else {
        dx_skip = dsum;  // identity shortcut
    }
    Tensor dh = conv3_->backward(bn3_->backward(dsum));
    if (sk_) {
        dh = sk_->backward(dh);
    } else {
        dh = conv2_->backward(bn2_->backward(relu2_.backward(dh)));
    }
    Tensor dx = conv1_->backward(bn1_->backward(relu1_.backward(dh)));
    dx.add_scaled(dx_skip, 1.0f);
    return dx;
}

void Bottleneck::collect_params(std::vector<nn::Param*>& out) {
    conv1_->collect_params(out);
    bn1_->collect_params(out);
    if (sk_) {
        sk_->collect_params(out);
    } else {
        conv2_->collect_params(out);
        bn2_->collect_params(out);
    }
    conv3_->collect_params(out);
    bn3_->collect_params(out);
    if (proj_conv_) {
        proj_conv_->collect_params(out);
        proj_bn_->collect_params(out);
    }
}

void Bottleneck::collect_state(std::vector<nn::NamedTensor>& out) {
    conv1_->collect_state(out);
    bn1_->collect_state(out);
    if (sk_) {
        sk_->collect_state(out);
    } else {
        conv2_->collect_state(out);
        bn2_->collect_state(out);
    }
    conv3_->collect_state(out);
    bn3_->collect_state(out);
    if (proj_conv_) {
        proj_conv_->collect_state(out);
        proj_bn_->collect_state(out);
    }
}

Encoder::Encoder(const EncoderConfig& cfg, Rng& rng) {
    validate(cfg);
    const std::vector<int> widths = encoder_stage_widths(cfg);
    stride_ = encoder_output_stride(cfg);
    stem_conv_ = std::make_unique<nn::Conv2d>("encoder.stem.conv", cfg.input_channels, widths[0],
                                              7, 2, 3, 1, false, rng);
    stem_bn_ = std::make_unique<nn::BatchNorm2d>("encoder.stem.bn", widths[0]);
    int in_ch = widths[0];
    for (size_t s = 0; s < cfg.stage_block_counts.size(); ++s) {
        for (int b = 0; b < cfg.stage_block_counts[s]; ++b) {
            const int stride = (s > 0 && b == 0) ? 2 : 1;
            auto block = std::make_unique<Bottleneck>(
                fmt::format("encoder.stage{}.block{}", s + 1, b), in_ch, widths[s], stride,
                cfg.use_selective_kernels, cfg.sk_reduction, cfg.sk_min_attention_width, rng);
            in_ch = block->out_channels();
            blocks_.push_back(std::move(block));
        }
    }
    out_ch_ = in_ch;
}

Tensor Encoder::forward(const Tensor& x, bool training) {
    MSEG_CHECK(x.rank() == 4, "encoder: expected NHWC input, got {}", x.shape_str());
    MSEG_CHECK(x.dim(1) % stride_ == 0 && x.dim(2) % stride_ == 0,
               "encoder: input {} not divisible by output stride {}", x.shape_str(), stride_);
    Tensor h = stem_pool_.forward(
        stem_relu_.forward(stem_bn_->forward(stem_conv_->forward(x, training), training), training),
        training);
    for (auto& block : blocks_) h = block->forward(h, training);
    return h;
}

Tensor Encoder::backward(const Tensor& dy) {
    Tensor d = dy;
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) d = (*it)->backward(d);
    return stem_conv_->backward(stem_bn_->backward(stem_relu_.backward(stem_pool_.backward(d))));
}

void Encoder::collect_params(std::vector<nn::Param*>& out) {
    stem_conv_->collect_params(out);
    stem_bn_->collect_params(out);
    for (auto& block : blocks_) block->collect_params(out);
}

void Encoder::collect_state(std::vector<nn::NamedTensor>& out) {
    stem_conv_->collect_state(out);
    stem_bn_->collect_state(out);
    for (auto& block : blocks_) block->collect_state(out);
}

}  // namespace marsseg::model
