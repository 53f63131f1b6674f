// Copyright 2026 The msgan Authors
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

#include <optional>
#include <string>
#include <vector>

#include "msgan/autodiff.hpp"
#include "msgan/rng.hpp"
#include "msgan/tensor.hpp"

namespace msgan {

/// Per-scale network shape. Channel width doubles every four downsamplings
/// counted from the coarsest scale.
struct NetSpec {
    int n_blocks = 5;
    int base_channels = 32;
    int kernel = 3;
    int image_channels = 3;
    int scale_index = 0;
    int scale_gap = 0;  // downsamplings between this scale and the coarsest

    int channels() const { return base_channels * (1 << (scale_gap / 4)); }
    int pad() const { return (kernel - 1) / 2; }
};

using GeneratorSpec = NetSpec;     // tail maps to image channels, tanh-bounded
using DiscriminatorSpec = NetSpec;  // tail maps to a 1-channel score map, linear

/// One Conv-(BatchNorm)-ReLU block. Head and tail blocks carry no
/// normalization; activations are applied by the forward functions.
struct ConvBlock {
    ad::Var w;         // (out, in, k, k)
    ad::Var b;         // (out)
    ad::Var bn_gamma;  // (out) when has_bn
    ad::Var bn_beta;   // (out) when has_bn
    bool has_bn = false;
};

/// Ordered weight stack of one network plus the norm accessors the bound
/// machinery needs. Layer count d and the embedding-layer unit count are
/// queryable; spectral norms are taken on the unrolled convolution operator.
class NetParams {
public:
    NetSpec spec;
    std::vector<ConvBlock> blocks;

    int depth() const { return static_cast<int>(blocks.size()); }
    /// Units feeding one output of the embedding (last) layer.
    int embedding_units() const;

    std::vector<ad::Var> parameters() const;
    void set_requires_grad(bool on) const;

    /// (spectral, frobenius) of layer i; spectral norm of the conv operator at
    /// spatial size (h, w) via power iteration, warm-startable.
    std::pair<double, double> layer_norms_at(int i, int h, int w, int iters, double tol,
                                             Tensor* warm_start = nullptr) const;
    double layer_frobenius_norm(int i) const;

    std::uint64_t fingerprint() const;
};

NetParams make_generator(const GeneratorSpec& spec, Rng& rng);
NetParams make_discriminator(const DiscriminatorSpec& spec, Rng& rng);

/// x_out = prev + psi(z + prev); at the coarsest scale (prev absent)
/// x_out = psi(z). Tanh bounds the residual body output.
ad::Var generator_forward(const NetParams& g, const ad::Var& z, const ad::Var* prev_upsampled);

/// Patch-critic score map. When `inject_at_embedding` is given it is added to
/// the input of the final (embedding) layer.
ad::Var discriminator_forward(const NetParams& d, const ad::Var& image,
                              const ad::Var* inject_at_embedding = nullptr);

/// Split forward for embedding-site attacks: body output == embedding input.
ad::Var discriminator_body(const NetParams& d, const ad::Var& image);
ad::Var discriminator_tail(const NetParams& d, const ad::Var& embedding_input);

/// (spectral, frobenius) per layer at spatial size (h, w).
std::vector<std::pair<double, double>> layer_norms(const NetParams& params, int h, int w,
                                                   int iters = 100, double tol = 1e-10);

}  // namespace msgan
