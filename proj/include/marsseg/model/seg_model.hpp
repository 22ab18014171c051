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

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "marsseg/model/config.hpp"
#include "marsseg/model/encoder.hpp"
#include "marsseg/model/heads.hpp"

namespace marsseg::model {

// Encoder f(.), projection head g(.), and atrous segmentation head with a
// named parameter table where every trainable tensor appears exactly once.
// The contrastive path (encode -> project) and the segmentation path
// (encode -> attach -> head) share the encoder and the first
// finetuneAttachLayer projection layers; run one path per forward/backward
// cycle.
class SegModel {
  public:
    SegModel(const EncoderConfig& enc, const ProjectionConfig& proj, const AtrousConfig& atrous,
             uint64_t seed);

    SegModel(const SegModel&) = delete;
    SegModel& operator=(const SegModel&) = delete;

    nn::Tensor encode(const nn::Tensor& batch, bool training);
    nn::Tensor project(const nn::Tensor& features, bool training);
    nn::Tensor segment(const nn::Tensor& features, bool training);

    // Gradient of the loss w.r.t. the stage output, propagated to parameter
    // .grad accumulators; returns d(input batch).
    nn::Tensor backward_contrastive(const nn::Tensor& d_embeddings);
    nn::Tensor backward_segmentation(const nn::Tensor& d_logits);

    std::vector<nn::Param*> parameters();
    std::vector<nn::NamedTensor> state();
    int64_t parameter_count();
    std::string describe();

    const EncoderConfig& encoder_config() const { return enc_cfg_; }
    const ProjectionConfig& projection_config() const { return proj_cfg_; }
    const AtrousConfig& atrous_config() const { return atrous_cfg_; }

    Encoder& encoder() { return *encoder_; }
    ProjectionHead& projection() { return *projection_; }
    AtrousHead& head() { return *head_; }

  private:
    EncoderConfig enc_cfg_;
    ProjectionConfig proj_cfg_;
    AtrousConfig atrous_cfg_;
    std::unique_ptr<Encoder> encoder_;
    std::unique_ptr<ProjectionHead> projection_;
    std::unique_ptr<AtrousHead> head_;
};

std::unique_ptr<SegModel> build_model(const EncoderConfig& enc, const ProjectionConfig& proj,
                                      const AtrousConfig& atrous, uint64_t seed);

// Decorrelates parameter initialization from the data-order seed streams.
// Shared by the CLI and the sweep so a given run seed always produces the
// same starting weights regardless of entry point.
uint64_t model_build_seed(uint64_t run_seed);

}  // namespace marsseg::model
