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

#include <vector>

#include "marsseg/nn/layers.hpp"

namespace marsseg::nn {

// Plain SGD with classical momentum: v <- mu*v + g; w <- w - lr*v.
class SGDMomentum {
  public:
    SGDMomentum(std::vector<Param*> params, float lr, float momentum);

    void set_lr(float lr) { lr_ = lr; }
    float lr() const { return lr_; }

    void zero_grad();
    void step();

  private:
    std::vector<Param*> params_;
    std::vector<Tensor> velocity_;
    float lr_ = 0.0f;
    float momentum_ = 0.0f;
};

}  // namespace marsseg::nn
