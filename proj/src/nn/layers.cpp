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

#include "marsseg/nn/layers.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>

#include "marsseg/common.hpp"
#include "marsseg/threading.hpp"

namespace marsseg::nn {

namespace {

using MatMap = Eigen::Map<Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using CMatMap =
    Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

int conv_out_dim(int in, int k, int stride, int pad, int dilation) {
    return (in + 2 * pad - dilation * (k - 1) - 1) / stride + 1;
}

}  // namespace

void Layer::collect_state(std::vector<NamedTensor>& out) {
    std::vector<Param*> params;
    collect_params(params);
    for (Param* p : params) out.push_back({p->name, &p->value, true});
}

// ---------------------------------------------------------------------------
// Conv2d

Conv2d::Conv2d(std::string name, int in_ch, int out_ch, int ksize, int stride, int pad,
               int dilation, bool with_bias, Rng& rng)
    : in_ch_(in_ch),
      out_ch_(out_ch),
      ksize_(ksize),
      stride_(stride),
      pad_(pad),
      dilation_(dilation),
      with_bias_(with_bias) {
    MSEG_CHECK(in_ch > 0 && out_ch > 0 && ksize > 0 && stride > 0 && dilation > 0,
               "{}: bad conv geometry", name);
    weight_.name = name + ".weight";
    weight_.value = Tensor({ksize, ksize, in_ch, out_ch});
    float stddev = std::sqrt(2.0f / (static_cast<float>(ksize) * ksize * in_ch));
    for (int64_t i = 0; i < weight_.value.size(); ++i) {
        weight_.value[i] = static_cast<float>(rng.normal(0.0, stddev));
    }
    if (with_bias_) {
        bias_.name = name + ".bias";
        bias_.value = Tensor({out_ch});
    }
}

void Conv2d::collect_params(std::vector<Param*>& out) {
    out.push_back(&weight_);
    if (with_bias_) out.push_back(&bias_);
}

Tensor Conv2d::forward(const Tensor& x, bool training) {
    MSEG_CHECK(x.rank() == 4 && x.dim(3) == in_ch_, "{}: input {} incompatible with in_ch {}",
               weight_.name, x.shape_str(), in_ch_);
    const int64_t B = x.dim(0), H = x.dim(1), W = x.dim(2);
    const int Ho = conv_out_dim(static_cast<int>(H), ksize_, stride_, pad_, dilation_);
    const int Wo = conv_out_dim(static_cast<int>(W), ksize_, stride_, pad_, dilation_);
    MSEG_CHECK(Ho > 0 && Wo > 0, "{}: input {} too small for kernel", weight_.name, x.shape_str());

    Tensor y({B, Ho, Wo, out_ch_});
    const int64_t K = static_cast<int64_t>(ksize_) * ksize_ * in_ch_;
    const int64_t HWo = static_cast<int64_t>(Ho) * Wo;
    CMatMap wmat(weight_.value.data(), K, out_ch_);

    const bool pointwise = (ksize_ == 1 && stride_ == 1 && pad_ == 0 && dilation_ == 1);
    if (pointwise) {
        CMatMap xin(x.data(), B * H * W, in_ch_);
        MatMap yout(y.data(), B * HWo, out_ch_);
        yout.noalias() = xin * wmat;
    } else {
        parallel_for(static_cast<size_t>(B), [&](size_t b0, size_t b1, int) {
            std::vector<float> col(static_cast<size_t>(HWo) * K);
            for (size_t b = b0; b < b1; ++b) {
                const float* xb = x.data() + b * H * W * in_ch_;
                float* cp = col.data();
                for (int oy = 0; oy < Ho; ++oy) {
                    for (int ox = 0; ox < Wo; ++ox) {
                        for (int ky = 0; ky < ksize_; ++ky) {
                            const int iy = oy * stride_ - pad_ + ky * dilation_;
                            for (int kx = 0; kx < ksize_; ++kx) {
                                const int ix = ox * stride_ - pad_ + kx * dilation_;
                                if (iy >= 0 && iy < H && ix >= 0 && ix < W) {
                                    const float* src = xb + (iy * W + ix) * in_ch_;
                                    std::copy(src, src + in_ch_, cp);
                                } else {
                                    std::fill(cp, cp + in_ch_, 0.0f);
                                }
                                cp += in_ch_;
                            }
                        }
                    }
                }
                CMatMap cmat(col.data(), HWo, K);
                MatMap ymat(y.data() + b * HWo * out_ch_, HWo, out_ch_);
                ymat.noalias() = cmat * wmat;
            }
        });
    }
    if (with_bias_) {
        float* yp = y.data();
        const float* bp = bias_.value.data();
        for (int64_t r = 0; r < B * HWo; ++r) {
            for (int c = 0; c < out_ch_; ++c) yp[r * out_ch_ + c] += bp[c];
        }
    }
    if (training) cached_input_ = x;
    return y;
}

Tensor Conv2d::backward(const Tensor& dy) {
    const Tensor& x = cached_input_;
    MSEG_CHECK(!x.empty(), "{}: backward before forward", weight_.name);
    const int64_t B = x.dim(0), H = x.dim(1), W = x.dim(2);
    const int Ho = static_cast<int>(dy.dim(1)), Wo = static_cast<int>(dy.dim(2));
    const int64_t K = static_cast<int64_t>(ksize_) * ksize_ * in_ch_;
    const int64_t HWo = static_cast<int64_t>(Ho) * Wo;

    weight_.ensure_grad();
    if (with_bias_) bias_.ensure_grad();
    Tensor dx(x.shape());
    CMatMap wmat(weight_.value.data(), K, out_ch_);

    const bool pointwise = (ksize_ == 1 && stride_ == 1 && pad_ == 0 && dilation_ == 1);
    if (pointwise) {
        CMatMap xin(x.data(), B * HWo, in_ch_);
        CMatMap dyk(dy.data(), B * HWo, out_ch_);
        MatMap dwm(weight_.grad.data(), K, out_ch_);
        dwm.noalias() += xin.transpose() * dyk;
        MatMap dxm(dx.data(), B * HWo, in_ch_);
        dxm.noalias() = dyk * wmat.transpose();
    } else {
        const int workers = num_threads();
        std::vector<Tensor> dw_part(workers);
        parallel_for(static_cast<size_t>(B), [&](size_t b0, size_t b1, int tid) {
            Tensor& dwp = dw_part[tid];
            if (dwp.empty()) dwp = Tensor(weight_.value.shape());
            std::vector<float> col(static_cast<size_t>(HWo) * K);
            std::vector<float> dcol(static_cast<size_t>(HWo) * K);
            for (size_t b = b0; b < b1; ++b) {
                const float* xb = x.data() + b * H * W * in_ch_;
                float* cp = col.data();
                for (int oy = 0; oy < Ho; ++oy) {
                    for (int ox = 0; ox < Wo; ++ox) {
                        for (int ky = 0; ky < ksize_; ++ky) {
                            const int iy = oy * stride_ - pad_ + ky * dilation_;
                            for (int kx = 0; kx < ksize_; ++kx) {
                                const int ix = ox * stride_ - pad_ + kx * dilation_;
                                if (iy >= 0 && iy < H && ix >= 0 && ix < W) {
                                    const float* src = xb + (iy * W + ix) * in_ch_;
                                    std::copy(src, src + in_ch_, cp);
                                } else {
                                    std::fill(cp, cp + in_ch_, 0.0f);
                                }
                                cp += in_ch_;
                            }
                        }
                    }
                }
                CMatMap cmat(col.data(), HWo, K);
                CMatMap dym(dy.data() + b * HWo * out_ch_, HWo, out_ch_);
                MatMap dwm(dwp.data(), K, out_ch_);
                dwm.noalias() += cmat.transpose() * dym;

                MatMap dcm(dcol.data(), HWo, K);
                dcm.noalias() = dym * wmat.transpose();

                // col2im scatter
                float* dxb = dx.data() + b * H * W * in_ch_;
                const float* dp = dcol.data();
                for (int oy = 0; oy < Ho; ++oy) {
                    for (int ox = 0; ox < Wo; ++ox) {
                        for (int ky = 0; ky < ksize_; ++ky) {
                            const int iy = oy * stride_ - pad_ + ky * dilation_;
                            for (int kx = 0; kx < ksize_; ++kx) {
                                const int ix = ox * stride_ - pad_ + kx * dilation_;
                                if (iy >= 0 && iy < H && ix >= 0 && ix < W) {
                                    float* dst = dxb + (iy * W + ix) * in_ch_;
                                    for (int c = 0; c < in_ch_; ++c) dst[c] += dp[c];
                                }
                                dp += in_ch_;
                            }
                        }
                    }
                }
            }
        });
        for (const Tensor& dwp : dw_part) {
            if (!dwp.empty()) weight_.grad.add_scaled(dwp, 1.0f);
        }
    }
    if (with_bias_) {
        const float* dyp = dy.data();
        float* dbp = bias_.grad.data();
        for (int64_t r = 0; r < B * HWo; ++r) {
            for (int c = 0; c < out_ch_; ++c) dbp[c] += dyp[r * out_ch_ + c];
        }
    }
    return dx;
}

// ---------------------------------------------------------------------------
// BatchNorm2d

BatchNorm2d::BatchNorm2d(std::string name, int channels) : channels_(channels), name_(name) {
    gamma_.name = name + ".gamma";
    gamma_.value = Tensor::full({channels}, 1.0f);
    beta_.name = name + ".beta";
    beta_.value = Tensor({channels});
    running_mean_ = Tensor({channels});
    running_var_ = Tensor::full({channels}, 1.0f);
}

void BatchNorm2d::collect_params(std::vector<Param*>& out) {
    out.push_back(&gamma_);
    out.push_back(&beta_);
}

void BatchNorm2d::collect_state(std::vector<NamedTensor>& out) {
    out.push_back({gamma_.name, &gamma_.value, true});
    out.push_back({beta_.name, &beta_.value, true});
    out.push_back({name_ + ".running_mean", &running_mean_, false});
    out.push_back({name_ + ".running_var", &running_var_, false});
}

Tensor BatchNorm2d::forward(const Tensor& x, bool training) {
    MSEG_CHECK(x.rank() == 4 && x.dim(3) == channels_, "{}: input {} vs channels {}", name_,
               x.shape_str(), channels_);
    const int64_t M = x.dim(0) * x.dim(1) * x.dim(2);
    const int C = channels_;

    std::vector<double> mean(C, 0.0), var(C, 0.0);
    if (training) {
        const float* xp = x.data();
        for (int64_t r = 0; r < M; ++r) {
            for (int c = 0; c < C; ++c) mean[c] += xp[r * C + c];
        }
        for (int c = 0; c < C; ++c) mean[c] /= static_cast<double>(M);
        for (int64_t r = 0; r < M; ++r) {
            for (int c = 0; c < C; ++c) {
                double d = xp[r * C + c] - mean[c];
                var[c] += d * d;
            }
        }
        for (int c = 0; c < C; ++c) var[c] /= static_cast<double>(M);
        // biased variance in both the batch statistics and the running buffers
        for (int c = 0; c < C; ++c) {
            running_mean_[c] = (1.0f - momentum_) * running_mean_[c] +
                               momentum_ * static_cast<float>(mean[c]);
            running_var_[c] =
                (1.0f - momentum_) * running_var_[c] + momentum_ * static_cast<float>(var[c]);
        }
    } else {
        for (int c = 0; c < C; ++c) {
            mean[c] = running_mean_[c];
            var[c] = running_var_[c];
        }
    }

    cached_invstd_.assign(C, 0.0f);
    for (int c = 0; c < C; ++c) {
        cached_invstd_[c] = static_cast<float>(1.0 / std::sqrt(var[c] + eps_));
    }
    cached_training_ = training;

    Tensor y(x.shape());
    cached_xhat_ = Tensor(x.shape());
    const float* xp = x.data();
    float* yp = y.data();
    float* hp = cached_xhat_.data();
    const float* gp = gamma_.value.data();
    const float* bp = beta_.value.data();
    std::vector<float> meanf(C);
    for (int c = 0; c < C; ++c) meanf[c] = static_cast<float>(mean[c]);
    for (int64_t r = 0; r < M; ++r) {
        for (int c = 0; c < C; ++c) {
            float xhat = (xp[r * C + c] - meanf[c]) * cached_invstd_[c];
            hp[r * C + c] = xhat;
            yp[r * C + c] = gp[c] * xhat + bp[c];
        }
    }
    return y;
}

Tensor BatchNorm2d::backward(const Tensor& dy) {
    MSEG_CHECK(!cached_xhat_.empty(), "{}: backward before forward", name_);
    const int C = channels_;
    const int64_t M = dy.size() / C;
    gamma_.ensure_grad();
    beta_.ensure_grad();

    std::vector<double> dgamma(C, 0.0), dbeta(C, 0.0);
    const float* dyp = dy.data();
    const float* hp = cached_xhat_.data();
    for (int64_t r = 0; r < M; ++r) {
        for (int c = 0; c < C; ++c) {
            dgamma[c] += static_cast<double>(dyp[r * C + c]) * hp[r * C + c];
            dbeta[c] += dyp[r * C + c];
        }
    }
    for (int c = 0; c < C; ++c) {
        gamma_.grad[c] += static_cast<float>(dgamma[c]);
        beta_.grad[c] += static_cast<float>(dbeta[c]);
    }

    Tensor dx(cached_xhat_.shape());
    float* dxp = dx.data();
    const float* gp = gamma_.value.data();
    if (cached_training_) {
        std::vector<float> k1(C), k2(C), k3(C);
        for (int c = 0; c < C; ++c) {
            k1[c] = gp[c] * cached_invstd_[c];
            k2[c] = static_cast<float>(dgamma[c] / static_cast<double>(M));
            k3[c] = static_cast<float>(dbeta[c] / static_cast<double>(M));
        }
        for (int64_t r = 0; r < M; ++r) {
            for (int c = 0; c < C; ++c) {
                dxp[r * C + c] =
                    k1[c] * (dyp[r * C + c] - hp[r * C + c] * k2[c] - k3[c]);
            }
        }
    } else {
        for (int64_t r = 0; r < M; ++r) {
            for (int c = 0; c < C; ++c) {
                dxp[r * C + c] = gp[c] * cached_invstd_[c] * dyp[r * C + c];
            }
        }
    }
    return dx;
}

// ---------------------------------------------------------------------------
// ReLU

Tensor ReLU::forward(const Tensor& x, bool training) {
    Tensor y(x.shape());
    if (training) mask_.assign(static_cast<size_t>(x.size()), 0);
    const float* xp = x.data();
    float* yp = y.data();
    for (int64_t i = 0; i < x.size(); ++i) {
        bool pos = xp[i] > 0.0f;
        yp[i] = pos ? xp[i] : 0.0f;
        if (training) mask_[static_cast<size_t>(i)] = pos;
    }
    return y;
}

Tensor ReLU::backward(const Tensor& dy) {
    MSEG_CHECK(mask_.size() == static_cast<size_t>(dy.size()), "ReLU: backward/forward mismatch");
    Tensor dx(dy.shape());
    const float* dyp = dy.data();
    float* dxp = dx.data();
    for (int64_t i = 0; i < dy.size(); ++i) dxp[i] = mask_[static_cast<size_t>(i)] ? dyp[i] : 0.0f;
    return dx;
}

// ---------------------------------------------------------------------------
// MaxPool2d

Tensor MaxPool2d::forward(const Tensor& x, bool training) {
    const int64_t B = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
    const int Ho = conv_out_dim(static_cast<int>(H), ksize_, stride_, pad_, 1);
    const int Wo = conv_out_dim(static_cast<int>(W), ksize_, stride_, pad_, 1);
    MSEG_CHECK(Ho > 0 && Wo > 0, "maxpool: input {} too small", x.shape_str());
    Tensor y({B, Ho, Wo, C});
    in_shape_ = x.shape();
    argmax_.assign(static_cast<size_t>(y.size()), -1);

    const float* xp = x.data();
    float* yp = y.data();
    for (int64_t b = 0; b < B; ++b) {
        for (int oy = 0; oy < Ho; ++oy) {
            for (int ox = 0; ox < Wo; ++ox) {
                for (int64_t c = 0; c < C; ++c) {
                    float best = -std::numeric_limits<float>::infinity();
                    int64_t best_idx = -1;
                    for (int ky = 0; ky < ksize_; ++ky) {
                        const int iy = oy * stride_ - pad_ + ky;
                        if (iy < 0 || iy >= H) continue;
                        for (int kx = 0; kx < ksize_; ++kx) {
                            const int ix = ox * stride_ - pad_ + kx;
                            if (ix < 0 || ix >= W) continue;
                            int64_t idx = ((b * H + iy) * W + ix) * C + c;
                            if (xp[idx] > best) {
                                best = xp[idx];
                                best_idx = idx;
                            }
                        }
                    }
                    int64_t oidx = ((b * Ho + oy) * Wo + ox) * C + c;
                    yp[oidx] = best;
                    argmax_[static_cast<size_t>(oidx)] = best_idx;
                }
            }
        }
    }
    (void)training;
    return y;
}

Tensor MaxPool2d::backward(const Tensor& dy) {
    MSEG_CHECK(argmax_.size() == static_cast<size_t>(dy.size()), "maxpool backward mismatch");
    Tensor dx(in_shape_);
    float* dxp = dx.data();
    const float* dyp = dy.data();
    for (int64_t i = 0; i < dy.size(); ++i) {
        int64_t src = argmax_[static_cast<size_t>(i)];
        if (src >= 0) dxp[src] += dyp[i];
    }
    return dx;
}

// ---------------------------------------------------------------------------
// Dense

Dense::Dense(std::string name, int in_dim, int out_dim, Rng& rng)
    : in_dim_(in_dim), out_dim_(out_dim) {
    weight_.name = name + ".weight";
    weight_.value = Tensor({in_dim, out_dim});
    float stddev = std::sqrt(2.0f / static_cast<float>(in_dim));
    for (int64_t i = 0; i < weight_.value.size(); ++i) {
        weight_.value[i] = static_cast<float>(rng.normal(0.0, stddev));
    }
    bias_.name = name + ".bias";
    bias_.value = Tensor({out_dim});
}

void Dense::collect_params(std::vector<Param*>& out) {
    out.push_back(&weight_);
    out.push_back(&bias_);
}

Tensor Dense::forward(const Tensor& x, bool training) {
    MSEG_CHECK(x.rank() >= 1 && x.dim(x.rank() - 1) == in_dim_, "{}: input {} vs in_dim {}",
               weight_.name, x.shape_str(), in_dim_);
    const int64_t rows = x.size() / in_dim_;
    std::vector<int64_t> out_shape = x.shape();
    out_shape.back() = out_dim_;
    Tensor y(out_shape);
    CMatMap xm(x.data(), rows, in_dim_);
    CMatMap wm(weight_.value.data(), in_dim_, out_dim_);
    MatMap ym(y.data(), rows, out_dim_);
    ym.noalias() = xm * wm;
    const float* bp = bias_.value.data();
    float* yp = y.data();
    for (int64_t r = 0; r < rows; ++r) {
        for (int c = 0; c < out_dim_; ++c) yp[r * out_dim_ + c] += bp[c];
    }
    if (training) cached_input_ = x;
    return y;
}

Tensor Dense::backward(const Tensor& dy) {
    const Tensor& x = cached_input_;
    MSEG_CHECK(!x.empty(), "{}: backward before forward", weight_.name);
    const int64_t rows = x.size() / in_dim_;
    weight_.ensure_grad();
    bias_.ensure_grad();
    CMatMap xm(x.data(), rows, in_dim_);
    CMatMap dym(dy.data(), rows, out_dim_);
    MatMap dwm(weight_.grad.data(), in_dim_, out_dim_);
    dwm.noalias() += xm.transpose() * dym;
    const float* dyp = dy.data();
    float* dbp = bias_.grad.data();
    for (int64_t r = 0; r < rows; ++r) {
        for (int c = 0; c < out_dim_; ++c) dbp[c] += dyp[r * out_dim_ + c];
    }
    Tensor dx(x.shape());
    CMatMap wm(weight_.value.data(), in_dim_, out_dim_);
    MatMap dxm(dx.data(), rows, in_dim_);
    dxm.noalias() = dym * wm.transpose();
    return dx;
}

// ---------------------------------------------------------------------------
// GlobalAvgPool

Tensor GlobalAvgPool::forward(const Tensor& x, bool training) {
    MSEG_CHECK(x.rank() == 4, "gap: expected NHWC input, got {}", x.shape_str());
    const int64_t B = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
    in_shape_ = x.shape();
    Tensor y({B, C});
    const float* xp = x.data();
    for (int64_t b = 0; b < B; ++b) {
        std::vector<double> acc(static_cast<size_t>(C), 0.0);
        for (int64_t r = 0; r < H * W; ++r) {
            for (int64_t c = 0; c < C; ++c) acc[static_cast<size_t>(c)] += xp[(b * H * W + r) * C + c];
        }
        for (int64_t c = 0; c < C; ++c) {
            y.at(b, c) = static_cast<float>(acc[static_cast<size_t>(c)] / static_cast<double>(H * W));
        }
    }
    (void)training;
    return y;
}

Tensor GlobalAvgPool::backward(const Tensor& dy) {
    const int64_t B = in_shape_[0], H = in_shape_[1], W = in_shape_[2], C = in_shape_[3];
    Tensor dx(in_shape_);
    float* dxp = dx.data();
    const float inv = 1.0f / static_cast<float>(H * W);
    for (int64_t b = 0; b < B; ++b) {
        for (int64_t r = 0; r < H * W; ++r) {
            for (int64_t c = 0; c < C; ++c) dxp[(b * H * W + r) * C + c] = dy.at(b, c) * inv;
        }
    }
    return dx;
}

// ---------------------------------------------------------------------------
// BilinearResize

namespace {
struct LerpIdx {
    int i0, i1;
    float w1;  // weight of i1; weight of i0 is 1-w1
};

std::vector<LerpIdx> lerp_table(int in_dim, int out_dim) {
    std::vector<LerpIdx> t(static_cast<size_t>(out_dim));
    const double scale = static_cast<double>(in_dim) / out_dim;
    for (int o = 0; o < out_dim; ++o) {
        double s = (o + 0.5) * scale - 0.5;
        double f = std::floor(s);
        int i0 = static_cast<int>(f);
        float w1 = static_cast<float>(s - f);
        int i1 = i0 + 1;
        if (i0 < 0) {
            i0 = 0;
            i1 = 0;
            w1 = 0.0f;
        } else if (i1 >= in_dim) {
            i1 = in_dim - 1;
            if (i0 >= in_dim) i0 = in_dim - 1;
        }
        t[static_cast<size_t>(o)] = {i0, i1, w1};
    }
    return t;
}
}  // namespace

Tensor bilinear_resize(const Tensor& x, int out_h, int out_w) {
    MSEG_CHECK(x.rank() == 4, "bilinear_resize: expected NHWC, got {}", x.shape_str());
    const int64_t B = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
    MSEG_CHECK(H > 0 && W > 0 && out_h > 0 && out_w > 0, "bilinear_resize: empty dims");
    Tensor y({B, out_h, out_w, C});
    auto ty = lerp_table(static_cast<int>(H), out_h);
    auto tx = lerp_table(static_cast<int>(W), out_w);
    parallel_for(static_cast<size_t>(B), [&](size_t b0, size_t b1, int) {
        for (size_t b = b0; b < b1; ++b) {
            const float* xb = x.data() + b * H * W * C;
            float* yb = y.data() + static_cast<int64_t>(b) * out_h * out_w * C;
            for (int oy = 0; oy < out_h; ++oy) {
                const auto& ly = ty[static_cast<size_t>(oy)];
                for (int ox = 0; ox < out_w; ++ox) {
                    const auto& lx = tx[static_cast<size_t>(ox)];
                    const float w00 = (1 - ly.w1) * (1 - lx.w1);
                    const float w01 = (1 - ly.w1) * lx.w1;
                    const float w10 = ly.w1 * (1 - lx.w1);
                    const float w11 = ly.w1 * lx.w1;
                    const float* p00 = xb + (ly.i0 * W + lx.i0) * C;
                    const float* p01 = xb + (ly.i0 * W + lx.i1) * C;
                    const float* p10 = xb + (ly.i1 * W + lx.i0) * C;
                    const float* p11 = xb + (ly.i1 * W + lx.i1) * C;
                    float* dst = yb + (static_cast<int64_t>(oy) * out_w + ox) * C;
                    for (int64_t c = 0; c < C; ++c) {
                        dst[c] = w00 * p00[c] + w01 * p01[c] + w10 * p10[c] + w11 * p11[c];
                    }
                }
            }
        }
    });
    return y;
}

Tensor BilinearResize::forward(const Tensor& x, bool training) {
    in_shape_ = x.shape();
    (void)training;
    return bilinear_resize(x, out_h_, out_w_);
}

Tensor BilinearResize::backward(const Tensor& dy) {
    const int64_t B = in_shape_[0], H = in_shape_[1], W = in_shape_[2], C = in_shape_[3];
    Tensor dx(in_shape_);
    auto ty = lerp_table(static_cast<int>(H), out_h_);
    auto tx = lerp_table(static_cast<int>(W), out_w_);
    parallel_for(static_cast<size_t>(B), [&](size_t b0, size_t b1, int) {
        for (size_t b = b0; b < b1; ++b) {
            float* dxb = dx.data() + b * H * W * C;
            const float* dyb = dy.data() + static_cast<int64_t>(b) * out_h_ * out_w_ * C;
            for (int oy = 0; oy < out_h_; ++oy) {
                const auto& ly = ty[static_cast<size_t>(oy)];
                for (int ox = 0; ox < out_w_; ++ox) {
                    const auto& lx = tx[static_cast<size_t>(ox)];
                    const float w00 = (1 - ly.w1) * (1 - lx.w1);
                    const float w01 = (1 - ly.w1) * lx.w1;
                    const float w10 = ly.w1 * (1 - lx.w1);
                    const float w11 = ly.w1 * lx.w1;
                    const float* src = dyb + (static_cast<int64_t>(oy) * out_w_ + ox) * C;
                    float* p00 = dxb + (ly.i0 * W + lx.i0) * C;
                    float* p01 = dxb + (ly.i0 * W + lx.i1) * C;
                    float* p10 = dxb + (ly.i1 * W + lx.i0) * C;
                    float* p11 = dxb + (ly.i1 * W + lx.i1) * C;
                    for (int64_t c = 0; c < C; ++c) {
                        p00[c] += w00 * src[c];
                        p01[c] += w01 * src[c];
                        p10[c] += w10 * src[c];
                        p11[c] += w11 * src[c];
                    }
                }
            }
        }
    });
    return dx;
}

// ---------------------------------------------------------------------------
// L2NormalizeRows

Tensor L2NormalizeRows::forward(const Tensor& x, bool training) {
    MSEG_CHECK(x.rank() == 2, "l2norm: expected (B,D), got {}", x.shape_str());
    const int64_t B = x.dim(0), D = x.dim(1);
    Tensor y(x.shape());
    cached_norm_.assign(static_cast<size_t>(B), 0.0f);
    for (int64_t b = 0; b < B; ++b) {
        double ss = 0.0;
        for (int64_t d = 0; d < D; ++d) ss += static_cast<double>(x.at(b, d)) * x.at(b, d);
        double norm = std::sqrt(ss);
        if (norm < 1e-20) {
            throw Error(fmt::format("degenerate embedding: row {} has zero norm", b));
        }
        cached_norm_[static_cast<size_t>(b)] = static_cast<float>(norm);
        for (int64_t d = 0; d < D; ++d) y.at(b, d) = static_cast<float>(x.at(b, d) / norm);
    }
    if (training) cached_unit_ = y;
    return y;
}

Tensor L2NormalizeRows::backward(const Tensor& dy) {
    MSEG_CHECK(!cached_unit_.empty(), "l2norm: backward before forward");
    const int64_t B = dy.dim(0), D = dy.dim(1);
    Tensor dx(dy.shape());
    for (int64_t b = 0; b < B; ++b) {
        double dot = 0.0;
        for (int64_t d = 0; d < D; ++d) {
            dot += static_cast<double>(cached_unit_.at(b, d)) * dy.at(b, d);
        }
        const float inv = 1.0f / cached_norm_[static_cast<size_t>(b)];
        for (int64_t d = 0; d < D; ++d) {
            dx.at(b, d) = inv * (dy.at(b, d) - static_cast<float>(dot) * cached_unit_.at(b, d));
        }
    }
    return dx;
}

}  // namespace marsseg::nn
