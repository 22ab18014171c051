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

#include "marsseg/model/seg_model.hpp"

#include <unordered_set>

#include "marsseg/common.hpp"
#include "marsseg/rng.hpp"

namespace marsseg::model {

using nn::Tensor;

SegModel::SegModel(const EncoderConfig& enc, const ProjectionConfig& proj,
                   const AtrousConfig& atrous, uint64_t seed)
    : enc_cfg_(enc), proj_cfg_(proj), atrous_cfg_(atrous) {
    validate(enc);
    validate(proj);
    validate(atrous);
    Rng rng(seed);
    encoder_ = std::make_unique<Encoder>(enc, rng);
    projection_ = std::make_unique<ProjectionHead>(proj, encoder_->out_channels(), rng);
    const int head_in = projection_->spatial_out_channels(proj.finetune_attach_layer);
    head_ = std::make_unique<AtrousHead>(atrous, head_in, rng);

    std::unordered_set<std::string> names;
    for (nn::Param* p : parameters()) {
        MSEG_CHECK(names.insert(p->name).second, "model: duplicate parameter name {}", p->name);
    }
}

Tensor SegModel::encode(const Tensor& batch, bool training) {
    return encoder_->forward(batch, training);
}

Tensor SegModel::project(const Tensor& features, bool training) {
    return projection_->forward(features, training);
}

Tensor SegModel::segment(const Tensor& features, bool training) {
    Tensor h = projection_->spatial_forward(features, proj_cfg_.finetune_attach_layer, training);
    return head_->forward(h, training);
}

Tensor SegModel::backward_contrastive(const Tensor& d_embeddings) {
    return encoder_->backward(projection_->backward(d_embeddings));
}

Tensor SegModel::backward_segmentation(const Tensor& d_logits) {
    Tensor d = head_->backward(d_logits);
    d = projection_->spatial_backward(d, proj_cfg_.finetune_attach_layer);
    return encoder_->backward(d);
}

std::vector<nn::Param*> SegModel::parameters() {
    std::vector<nn::Param*> params;
    encoder_->collect_params(params);
    projection_->collect_params(params);
    head_->collect_params(params);
    return params;
}

std::vector<nn::NamedTensor> SegModel::state() {
    std::vector<nn::NamedTensor> state;
    encoder_->collect_state(state);
    projection_->collect_state(state);
    head_->collect_state(state);
    return state;
}

int64_t SegModel::parameter_count() {
    int64_t total = 0;
    for (nn::Param* p : parameters()) total += p->value.size();
    return total;
}

std::string SegModel::describe() {
    std::string out = fmt::format("{:<44} {:>20} {:>12}\n", "parameter", "shape", "count");
    int64_t total = 0;
    for (nn::Param* p : parameters()) {
        out += fmt::format("{:<44} {:>20} {:>12}\n", p->name, p->value.shape_str(),
                           p->value.size());
        total += p->value.size();
    }
    out += fmt::format("{:<44} {:>20} {:>12}\n", "total", "", total);
    return out;
}

std::unique_ptr<SegModel> build_model(const EncoderConfig& enc, const ProjectionConfig& proj,
                                      const AtrousConfig& atrous, uint64_t seed) {
    return std::make_unique<SegModel>(enc, proj, atrous, seed);
}

uint64_t model_build_seed(uint64_t run_seed) { return derive_seed(run_seed, 0xB00D); }

}  // namespace marsseg::model
