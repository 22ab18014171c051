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

#include "marsseg/model/sk.hpp"

#include <algorithm>
#include <cmath>

#include "marsseg/common.hpp"

namespace marsseg::model {

using nn::Tensor;

Tensor sk_attention_weights(const Tensor& logits) {
    MSEG_CHECK(logits.rank() == 3, "sk: attention logits must be (B,branches,C), got {}",
               logits.shape_str());
    const int64_t B = logits.dim(0), R = logits.dim(1), C = logits.dim(2);
    Tensor w(logits.shape());
    for (int64_t b = 0; b < B; ++b) {
        for (int64_t c = 0; c < C; ++c) {
            float mx = -std::numeric_limits<float>::infinity();
            for (int64_t r = 0; r < R; ++r) mx = std::max(mx, logits.at(b, r, c));
            double denom = 0.0;
            for (int64_t r = 0; r < R; ++r) denom += std::exp(static_cast<double>(logits.at(b, r, c)) - mx);
            for (int64_t r = 0; r < R; ++r) {
                w.at(b, r, c) = static_cast<float>(
                    std::exp(static_cast<double>(logits.at(b, r, c)) - mx) / denom);
            }
        }
    }
    return w;
}

Tensor sk_fuse(const std::vector<Tensor>& branches, const Tensor& weights) {
    MSEG_CHECK(!branches.empty(), "sk: no branches");
    const Tensor& first = branches.front();
    for (const Tensor& t : branches) {
        MSEG_CHECK(t.shape() == first.shape(), "sk: branch shape mismatch {} vs {}", t.shape_str(),
                   first.shape_str());
    }
    const int64_t B = first.dim(0), HW = first.dim(1) * first.dim(2), C = first.dim(3);
    MSEG_CHECK(weights.rank() == 3 && weights.dim(0) == B &&
                   weights.dim(1) == static_cast<int64_t>(branches.size()) && weights.dim(2) == C,
               "sk: weights {} incompatible with {} branches of {}", weights.shape_str(),
               branches.size(), first.shape_str());
    Tensor y(first.shape());
    float* yp = y.data();
    for (size_t r = 0; r < branches.size(); ++r) {
        const float* bp = branches[r].data();
        for (int64_t b = 0; b < B; ++b) {
            const float* wp = weights.data() + (b * weights.dim(1) + static_cast<int64_t>(r)) * C;
            float* yb = yp + b * HW * C;
            const float* xb = bp + b * HW * C;
            for (int64_t p = 0; p < HW; ++p) {
                for (int64_t c = 0; c < C; ++c) yb[p * C + c] += wp[c] * xb[p * C + c];
            }
        }
    }
    return y;
}

SKConv::SKConv(std::string name, int in_ch, int out_ch, int stride, int reduction, int min_width,
               Rng& rng)
    : out_ch_(out_ch) {
    const int dilation[2] = {1, 2};
    for (int i = 0; i < 2; ++i) {
        // pad == dilation keeps the spatial size at stride 1
        conv_[i] = std::make_unique<nn::Conv2d>(fmt::format("{}.branch{}.conv", name, i), in_ch,
                                                out_ch, 3, stride, dilation[i], dilation[i],
                                                /*with_bias=*/false, rng);
        bn_[i] = std::make_unique<nn::BatchNorm2d>(fmt::format("{}.branch{}.bn", name, i), out_ch);
    }
    const int d = std::max(out_ch / reduction, min_width);
    fc1_ = std::make_unique<nn::Dense>(name + ".fc1", out_ch, d, rng);
    fc2_ = std::make_unique<nn::Dense>(name + ".fc2", d, 2 * out_ch, rng);
}

Tensor SKConv::branch_forward(int br, const Tensor& x, bool training) {
    return relu_[br].forward(bn_[br]->forward(conv_[br]->forward(x, training), training), training);
}

Tensor SKConv::branch_backward(int br, const Tensor& dy) {
    return conv_[br]->backward(bn_[br]->backward(relu_[br].backward(dy)));
}

Tensor SKConv::forward(const Tensor& x, bool training) {
    Tensor a = branch_forward(0, x, training);
    Tensor b = branch_forward(1, x, training);
    Tensor u(a.shape());
    u.add_scaled(a, 1.0f);
    u.add_scaled(b, 1.0f);
    Tensor s = gap_.forward(u, training);
    Tensor z = fc_relu_.forward(fc1_->forward(s, training), training);
    Tensor logits = fc2_->forward(z, training);
    logits.reshape({logits.dim(0), 2, out_ch_});
    Tensor w = sk_attention_weights(logits);
    Tensor y = sk_fuse({a, b}, w);
    if (training) {
        cached_a_ = std::move(a);
        cached_b_ = std::move(b);
        cached_weights_ = std::move(w);
    }
    return y;
}

Tensor SKConv::backward(const Tensor& dy) {
    MSEG_CHECK(!cached_weights_.empty(), "sk: backward before forward");
    const Tensor& a = cached_a_;
    const Tensor& b = cached_b_;
    const Tensor& w = cached_weights_;
    const int64_t B = a.dim(0), HW = a.dim(1) * a.dim(2), C = a.dim(3);

    // direct branch paths plus channel attention sensitivities
    Tensor da(a.shape()), db(b.shape());
    Tensor dw({B, 2, C});
    for (int64_t n = 0; n < B; ++n) {
        const float* w0 = w.data() + (n * 2 + 0) * C;
        const float* w1 = w.data() + (n * 2 + 1) * C;
        for (int64_t p = 0; p < HW; ++p) {
            const int64_t off = (n * HW + p) * C;
            for (int64_t c = 0; c < C; ++c) {
                const float g = dy.data()[off + c];
                da.data()[off + c] = w0[c] * g;
                db.data()[off + c] = w1[c] * g;
                dw.at(n, 0, c) += g * a.data()[off + c];
                dw.at(n, 1, c) += g * b.data()[off + c];
            }
        }
    }

    // softmax over the branch axis
    Tensor dlogits({B, 2, C});
    for (int64_t n = 0; n < B; ++n) {
        for (int64_t c = 0; c < C; ++c) {
            const float s = w.at(n, 0, c) * dw.at(n, 0, c) + w.at(n, 1, c) * dw.at(n, 1, c);
            dlogits.at(n, 0, c) = w.at(n, 0, c) * (dw.at(n, 0, c) - s);
            dlogits.at(n, 1, c) = w.at(n, 1, c) * (dw.at(n, 1, c) - s);
        }
    }
    dlogits.reshape({B, 2 * C});
    Tensor ds = fc1_->backward(fc_relu_.backward(fc2_->backward(dlogits)));
    Tensor du = gap_.backward(ds);
    da.add_scaled(du, 1.0f);
    db.add_scaled(du, 1.0f);

    Tensor dx = branch_backward(0, da);
    dx.add_scaled(branch_backward(1, db), 1.0f);
    return dx;
}

void SKConv::collect_params(std::vector<nn::Param*>& out) {
    for (int i = 0; i < 2; ++i) {
        conv_[i]->collect_params(out);
        bn_[i]->collect_params(out);
    }
    fc1_->collect_params(out);
    fc2_->collect_params(out);
}

void SKConv::collect_state(std::vector<nn::NamedTensor>& out) {
    for (int i = 0; i < 2; ++i) {
        conv_[i]->collect_state(out);
        bn_[i]->collect_state(out);
    }
    fc1_->collect_state(out);
    fc2_->collect_state(out);
}

}  // namespace marsseg::model
