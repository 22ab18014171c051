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

#include "marsseg/rng.hpp"
#include "marsseg/tensor.hpp"

namespace marsseg::nn {

// Trainable tensor with its gradient. Gradients are allocated lazily so that
// inference-only models (e.g. the paper-scale parameter report) stay cheap.
struct Param {
    std::string name;
    Tensor value;
    Tensor grad;

    void ensure_grad() {
        if (grad.size() != value.size()) grad = Tensor(value.shape());
    }
};

// A named tensor exposed for checkpointing: trainable parameters plus
// persistent buffers (batch-norm running statistics).
struct NamedTensor {
    std::string name;
    Tensor* tensor = nullptr;
    bool trainable = false;
};

// Layers cache whatever forward state their backward pass needs. backward()
// consumes d(loss)/d(output) and returns d(loss)/d(input), accumulating into
// parameter gradients (callers zero grads between steps).
class Layer {
 public:
    virtual ~Layer() = default;
    virtual Tensor forward(const Tensor& x, bool training) = 0;
    virtual Tensor backward(const Tensor& dy) = 0;
    virtual void collect_params(std::vector<Param*>& out) {}
    virtual void collect_state(std::vector<NamedTensor>& out);
};

class Conv2d : public Layer {
 public:
    // weight layout (k, k, in_ch, out_ch); fan-in-scaled normal init, zero bias.
    Conv2d(std::string name, int in_ch, int out_ch, int ksize, int stride, int pad, int dilation,
           bool with_bias, Rng& rng);

    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(std::vector<Param*>& out) override;

    int in_channels() const { return in_ch_; }
    int out_channels() const { return out_ch_; }
    Param& weight() { return weight_; }
    Param& bias() { return bias_; }
    bool has_bias() const { return with_bias_; }

 private:
    int in_ch_, out_ch_, ksize_, stride_, pad_, dilation_;
    bool with_bias_;
    Param weight_;
    Param bias_;
    Tensor cached_input_;
};

class BatchNorm2d : public Layer {
 public:
    BatchNorm2d(std::string name, int channels);

    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(std::vector<Param*>& out) override;
    void collect_state(std::vector<NamedTensor>& out) override;

    Param& gamma() { return gamma_; }
    Param& beta() { return beta_; }

 private:
    int channels_;
    float momentum_ = 0.1f;
    float eps_ = 1e-5f;
    Param gamma_, beta_;
    Tensor running_mean_, running_var_;
    std::string name_;

    // backward caches
    Tensor cached_xhat_;
    std::vector<float> cached_invstd_;
    bool cached_training_ = false;
};

class ReLU : public Layer {
 public:
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;

 private:
    std::vector<uint8_t> mask_;
};

class MaxPool2d : public Layer {
 public:
    MaxPool2d(int ksize, int stride, int pad) : ksize_(ksize), stride_(stride), pad_(pad) {}

    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;

 private:
    int ksize_, stride_, pad_;
    std::vector<int64_t> argmax_;
    std::vector<int64_t> in_shape_;
};

class Dense : public Layer {
 public:
    // weight layout (in, out). Accepts any tensor whose trailing dimension is
    // `in`; leading dimensions are flattened, which is how projection-head
    // layers get reapplied as 1x1 convolutions on spatial features.
    Dense(std::string name, int in_dim, int out_dim, Rng& rng);

    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(std::vector<Param*>& out) override;

    int in_dim() const { return in_dim_; }
    int out_dim() const { return out_dim_; }
    Param& weight() { return weight_; }
    Param& bias() { return bias_; }

 private:
    int in_dim_, out_dim_;
    Param weight_, bias_;
    Tensor cached_input_;
};

class GlobalAvgPool : public Layer {
 public:
    Tensor forward(const Tensor& x, bool training) override;  // (B,H,W,C) -> (B,C)
    Tensor backward(const Tensor& dy) override;

 private:
    std::vector<int64_t> in_shape_;
};

// align_corners=false sampling; differentiable (scatter transpose in backward).
class BilinearResize : public Layer {
 public:
    BilinearResize(int out_h, int out_w) : out_h_(out_h), out_w_(out_w) {}

    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;

    void set_output_size(int out_h, int out_w) {
        out_h_ = out_h;
        out_w_ = out_w;
    }

 private:
    int out_h_, out_w_;
    std::vector<int64_t> in_shape_;
};

// Row-wise L2 normalization for (B, D) embeddings. A zero row is a degenerate
// embedding and raises an error.
class L2NormalizeRows : public Layer {
 public:
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;

 private:
    Tensor cached_unit_;
    std::vector<float> cached_norm_;
};

// Free-function reference kernels used by both layers and oracles.
Tensor bilinear_resize(const Tensor& x, int out_h, int out_w);

}  // namespace marsseg::nn
