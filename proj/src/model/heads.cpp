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

#include "marsseg/model/heads.hpp"

#include <algorithm>

#include "marsseg/common.hpp"

namespace marsseg::model {

using nn::Tensor;

ProjectionHead::ProjectionHead(const ProjectionConfig& cfg, int in_channels, Rng& rng)
    : layer_count_(cfg.layer_count) {
    validate(cfg);
    int in_dim = in_channels;
    for (int i = 0; i < cfg.layer_count; ++i) {
        const int out_dim = (i + 1 == cfg.layer_count) ? cfg.output_dim : cfg.hidden_width;
        dense_.push_back(
            std::make_unique<nn::Dense>(fmt::format("projection.fc{}", i + 1), in_dim, out_dim, rng));
        in_dim = out_dim;
    }
    relu_.resize(static_cast<size_t>(cfg.layer_count));
    spatial_relu_.resize(static_cast<size_t>(cfg.layer_count));
}

Tensor ProjectionHead::forward(const Tensor& features, bool training) {
    Tensor h = gap_.forward(features, training);
    for (int i = 0; i < layer_count_; ++i) {
        h = dense_[static_cast<size_t>(i)]->forward(h, training);
        if (i + 1 < layer_count_) h = relu_[static_cast<size_t>(i)].forward(h, training);
    }
    return l2norm_.forward(h, training);
}

Tensor ProjectionHead::backward(const Tensor& d_embeddings) {
    Tensor d = l2norm_.backward(d_embeddings);
    for (int i = layer_count_ - 1; i >= 0; --i) {
        if (i + 1 < layer_count_) d = relu_[static_cast<size_t>(i)].backward(d);
        d = dense_[static_cast<size_t>(i)]->backward(d);
    }
    return gap_.backward(d);
}

Tensor ProjectionHead::spatial_forward(const Tensor& features, int depth, bool training) {
    MSEG_CHECK(depth >= 0 && depth < layer_count_, "projection: attach depth {} outside [0,{})",
               depth, layer_count_);
    Tensor h = features;
    for (int i = 0; i < depth; ++i) {
        // Dense flattens leading dims, so this is a shared-weight 1x1 conv.
        h = dense_[static_cast<size_t>(i)]->forward(h, training);
        h = spatial_relu_[static_cast<size_t>(i)].forward(h, training);
    }
    return h;
}

Tensor ProjectionHead::spatial_backward(const Tensor& dy, int depth) {
    Tensor d = dy;
    for (int i = depth - 1; i >= 0; --i) {
        d = spatial_relu_[static_cast<size_t>(i)].backward(d);
        d = dense_[static_cast<size_t>(i)]->backward(d);
    }
    return d;
}

int ProjectionHead::spatial_out_channels(int depth) const {
    if (depth == 0) return static_cast<int>(dense_.front()->in_dim());
    return static_cast<int>(dense_[static_cast<size_t>(depth - 1)]->out_dim());
}

void ProjectionHead::collect_params(std::vector<nn::Param*>& out) {
    for (auto& d : dense_) d->collect_params(out);
}

void ProjectionHead::collect_state(std::vector<nn::NamedTensor>& out) {
    for (auto& d : dense_) d->collect_state(out);
}

AtrousHead::AtrousHead(const AtrousConfig& cfg, int in_channels, Rng& rng)
    : filters_(cfg.filters_per_branch),
      num_classes_(cfg.num_classes),
      resize_(cfg.output_h, cfg.output_w) {
    validate(cfg);
    for (size_t i = 0; i < cfg.dilation_rates.size(); ++i) {
        const int d = cfg.dilation_rates[i];
        const int pad = d * (cfg.kernel_size - 1) / 2;
        branch_conv_.push_back(std::make_unique<nn::Conv2d>(
            fmt::format("head.branch{}.conv", i), in_channels, cfg.filters_per_branch,
            cfg.kernel_size, 1, pad, d, /*with_bias=*/true, rng));
    }
    branch_relu_.resize(branch_conv_.size());
    classifier_ = std::make_unique<nn::Conv2d>(
        "head.classifier", cfg.filters_per_branch * static_cast<int>(cfg.dilation_rates.size()),
        cfg.num_classes, 1, 1, 0, 1, /*with_bias=*/true, rng);
}

Tensor AtrousHead::forward(const Tensor& features, bool training) {
    const int64_t B = features.dim(0), H = features.dim(1), W = features.dim(2);
    const int branches = static_cast<int>(branch_conv_.size());
    Tensor cat({B, H, W, static_cast<int64_t>(branches) * filters_});
    for (int i = 0; i < branches; ++i) {
        Tensor b = branch_relu_[static_cast<size_t>(i)].forward(
            branch_conv_[static_cast<size_t>(i)]->forward(features, training), training);
        const float* src = b.data();
        float* dst = cat.data() + static_cast<int64_t>(i) * filters_;
        const int64_t positions = B * H * W;
        for (int64_t p = 0; p < positions; ++p) {
            std::copy(src + p * filters_, src + (p + 1) * filters_,
                      dst + p * branches * filters_);
        }
    }
    Tensor up = resize_.forward(cat, training);
    return classifier_->forward(up, training);
}

Tensor AtrousHead::backward(const Tensor& d_logits) {
    Tensor dup = classifier_->backward(d_logits);
    Tensor dcat = resize_.backward(dup);
    const int branches = static_cast<int>(branch_conv_.size());
    const int64_t positions = dcat.size() / (static_cast<int64_t>(branches) * filters_);
    Tensor dx;
    for (int i = 0; i < branches; ++i) {
        Tensor db({positions, static_cast<int64_t>(filters_)});
        const float* src = dcat.data() + static_cast<int64_t>(i) * filters_;
        float* dst = db.data();
        for (int64_t p = 0; p < positions; ++p) {
            std::copy(src + p * branches * filters_, src + p * branches * filters_ + filters_,
                      dst + p * filters_);
        }
        // restore NHWC of the branch output
        db.reshape({dcat.dim(0), dcat.dim(1), dcat.dim(2), static_cast<int64_t>(filters_)});
        Tensor dbi = branch_conv_[static_cast<size_t>(i)]->backward(
            branch_relu_[static_cast<size_t>(i)].backward(db));
        if (dx.empty()) {
            dx = std::move(dbi);
        } else {
            dx.add_scaled(dbi, 1.0f);
        }
    }
    return dx;
}

void AtrousHead::collect_params(std::vector<nn::Param*>& out) {
    for (auto& c : branch_conv_) c->collect_params(out);
    classifier_->collect_params(out);
}

void AtrousHead::collect_state(std::vector<nn::NamedTensor>& out) {
    for (auto& c : branch_conv_) c->collect_state(out);
    classifier_->collect_state(out);
}

}  // namespace marsseg::model
