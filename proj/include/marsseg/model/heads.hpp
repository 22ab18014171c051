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
#include <vector>

#include "marsseg/model/config.hpp"
#include "marsseg/nn/layers.hpp"

namespace marsseg::model {

// MLP projection head g(.) ending in L2 normalization. The first
// finetuneAttachLayer dense layers can also be applied per spatial position
// (spatial_forward), sharing weights with the pooled path; only one of the
// two paths may be active per forward/backward cycle.
class ProjectionHead : public nn::Layer {
  public:
    ProjectionHead(const ProjectionConfig& cfg, int in_channels, Rng& rng);

    nn::Tensor forward(const nn::Tensor& features, bool training) override;
    nn::Tensor backward(const nn::Tensor& d_embeddings) override;

    // First `depth` dense layers + ReLU applied at every spatial position.
    nn::Tensor spatial_forward(const nn::Tensor& features, int depth, bool training);
    nn::Tensor spatial_backward(const nn::Tensor& dy, int depth);

    int spatial_out_channels(int depth) const;
    void collect_params(std::vector<nn::Param*>& out) override;
    void collect_state(std::vector<nn::NamedTensor>& out) override;

  private:
    int layer_count_ = 0;
    nn::GlobalAvgPool gap_;
    std::vector<std::unique_ptr<nn::Dense>> dense_;
    std::vector<nn::ReLU> relu_;          // pooled path, after layers 0..n-2
    std::vector<nn::ReLU> spatial_relu_;  // spatial path
    nn::L2NormalizeRows l2norm_;
};

// Parallel dilated convolution branches (conv + bias + ReLU each), channel
// concatenation, bilinear resize to the configured output size, and a final
// 1x1 convolution producing per-class logits.
class AtrousHead : public nn::Layer {
  public:
    AtrousHead(const AtrousConfig& cfg, int in_channels, Rng& rng);

    nn::Tensor forward(const nn::Tensor& features, bool training) override;
    nn::Tensor backward(const nn::Tensor& d_logits) override;
    void collect_params(std::vector<nn::Param*>& out) override;
    void collect_state(std::vector<nn::NamedTensor>& out) override;

    void set_output_size(int h, int w) { resize_.set_output_size(h, w); }
    int num_classes() const { return num_classes_; }

  private:
    int filters_ = 0;
    int num_classes_ = 0;
    std::vector<std::unique_ptr<nn::Conv2d>> branch_conv_;
    std::vector<nn::ReLU> branch_relu_;
    nn::BilinearResize resize_;
    std::unique_ptr<nn::Conv2d> classifier_;
};

}  // namespace marsseg::model
