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

#include "marsseg/tensor.hpp"

#include <algorithm>

#include "marsseg/common.hpp"

namespace marsseg {

int64_t shape_size(const std::vector<int64_t>& shape) {
    int64_t n = 1;
    for (int64_t d : shape) {
        MSEG_CHECK(d >= 0, "negative dimension {}", d);
        n *= d;
    }
    return n;
}

Tensor::Tensor(std::vector<int64_t> shape) : shape_(std::move(shape)) {
    data_.assign(static_cast<size_t>(shape_size(shape_)), 0.0f);
}

Tensor Tensor::full(std::vector<int64_t> shape, float value) {
    Tensor t(std::move(shape));
    t.fill(value);
    return t;
}

void Tensor::reshape(std::vector<int64_t> shape) {
    MSEG_CHECK(shape_size(shape) == size(), "reshape from {} changes element count ({} vs {})",
               shape_str(), shape_size(shape), size());
    shape_ = std::move(shape);
}

void Tensor::fill(float v) {
    std::fill(data_.begin(), data_.end(), v);
}

void Tensor::add_scaled(const Tensor& other, float s) {
    MSEG_CHECK(other.size() == size(), "add_scaled size mismatch {} vs {}", other.size(), size());
    const float* o = other.data();
    float* p = data();
    for (int64_t i = 0; i < size(); ++i) p[i] += s * o[i];
}

void Tensor::scale(float s) {
    for (auto& v : data_) v *= s;
}

std::string Tensor::shape_str() const {
    std::string s = "(";
    for (size_t i = 0; i < shape_.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape_[i]);
    }
    return s + ")";
}

}  // namespace marsseg
