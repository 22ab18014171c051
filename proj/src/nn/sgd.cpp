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

#include "marsseg/nn/sgd.hpp"

#include "marsseg/common.hpp"

namespace marsseg::nn {

SGDMomentum::SGDMomentum(std::vector<Param*> params, float lr, float momentum)
    : params_(std::move(params)), lr_(lr), momentum_(momentum) {
    MSEG_CHECK(lr >= 0.0f, "sgd: negative learning rate {}", lr);
    MSEG_CHECK(momentum >= 0.0f && momentum < 1.0f, "sgd: momentum {} out of [0,1)", momentum);
    velocity_.resize(params_.size());
}

void SGDMomentum::zero_grad() {
    for (Param* p : params_) {
        if (!p->grad.empty()) p->grad.zero();
    }
}

void SGDMomentum::step() {
    for (size_t i = 0; i < params_.size(); ++i) {
        Param* p = params_[i];
        if (p->grad.empty()) continue;  // parameter never touched this step
        Tensor& v = velocity_[i];
        if (v.empty()) v = Tensor(p->value.shape());
        float* vp = v.data();
        const float* gp = p->grad.data();
        float* wp = p->value.data();
        for (int64_t j = 0; j < p->value.size(); ++j) {
            vp[j] = momentum_ * vp[j] + gp[j];
            wp[j] -= lr_ * vp[j];
        }
    }
}

}  // namespace marsseg::nn
