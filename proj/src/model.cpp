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

#include "msgan/model.hpp"

#include <cmath>

#include "msgan/common.hpp"
#include "msgan/spectral.hpp"

namespace msgan {

namespace {

constexpr double kWeightInitStd = 0.02;
constexpr double kBnEps = 1e-5;

ConvBlock make_block(int in_ch, int out_ch, int k, bool with_bn, Rng& rng) {
    ConvBlock blk;
    blk.w = ad::leaf(rng.normal_tensor({out_ch, in_ch, k, k}, kWeightInitStd));
    blk.b = ad::leaf(Tensor::zeros({out_ch}));
    blk.has_bn = with_bn;
    if (with_bn) {
        blk.bn_gamma = ad::leaf(Tensor::ones({out_ch}));
        blk.bn_beta = ad::leaf(Tensor::zeros({out_ch}));
    }
    return blk;
}

// Normalizes per channel over the (single-image) batch and spatial dims with
// live statistics; built from primitive ops so it stays differentiable to any
// order the penalty terms need.
ad::Var batch_norm(const ad::Var& x, const ConvBlock& blk) {
    const auto& shape = x->value.shape();
    ad::Var mu = ad::channel_mean(x);
    ad::Var xc = ad::sub(x, ad::channel_expand(mu, shape));
    ad::Var var = ad::channel_mean(ad::mul(xc, xc));
    ad::Var inv = ad::rsqrt_eps(var, kBnEps);
    ad::Var xhat = ad::mul(xc, ad::channel_expand(inv, shape));
    return ad::add(ad::mul(xhat, ad::channel_expand(blk.bn_gamma, shape)),
                   ad::channel_expand(blk.bn_beta, shape));
}

ad::Var conv_block_forward(const ConvBlock& blk, const ad::Var& x, int pad, bool relu_after) {
    ad::Var y = ad::conv2d(x, blk.w, pad);
    y = ad::add(y, ad::channel_expand(blk.b, y->value.shape()));
    if (blk.has_bn) y = batch_norm(y, blk);
    return relu_after ? ad::relu(y) : y;
}

NetParams make_net(const NetSpec& spec, int out_channels, Rng& rng) {
    if (spec.n_blocks < 3) throw InvalidInputError("NetSpec: n_blocks must be >= 3");
    NetParams net;
    net.spec = spec;
    const int ch = spec.channels();
    // head: no normalization
    net.blocks.push_back(make_block(spec.image_channels, ch, spec.kernel, false, rng));
    for (int i = 1; i + 1 < spec.n_blocks; ++i)
        net.blocks.push_back(make_block(ch, ch, spec.kernel, true, rng));
    // tail: no normalization, activation applied by the caller
    net.blocks.push_back(make_block(ch, out_channels, spec.kernel, false, rng));
    return net;
}

ad::Var body_forward(const NetParams& net, const ad::Var& input) {
    ad::Var h = input;
    const int pad = net.spec.pad();
    for (size_t i = 0; i + 1 < net.blocks.size(); ++i)
        h = conv_block_forward(net.blocks[i], h, pad, /*relu_after=*/true);
    return h;
}

}  // namespace

int NetParams::embedding_units() const {
    const auto& w = blocks.back().w->value;
    return w.dim(1) * w.dim(2) * w.dim(3);  // fan-in of one unit of the last layer
}

std::vector<ad::Var> NetParams::parameters() const {
    std::vector<ad::Var> out;
    for (const auto& blk : blocks) {
        out.push_back(blk.w);
        out.push_back(blk.b);
        if (blk.has_bn) {
            out.push_back(blk.bn_gamma);
            out.push_back(blk.bn_beta);
        }
    }
    return out;
}

void NetParams::set_requires_grad(bool on) const {
    for (const auto& p : parameters()) p->requires_grad = on;
}

std::pair<double, double> NetParams::layer_norms_at(int i, int h, int w, int iters,
                                                    double tol, Tensor* warm_start) const {
    const auto& kernel = blocks[static_cast<size_t>(i)].w->value;
    ConvOperator op(kernel, h, w, spec.pad());
    const double sn = spectral_norm(op, iters, tol, warm_start);
    return {sn, layer_frobenius_norm(i)};
}

double NetParams::layer_frobenius_norm(int i) const {
    return blocks[static_cast<size_t>(i)].w->value.l2_norm();
}

std::uint64_t NetParams::fingerprint() const {
    std::uint64_t h = 0x9ae16a3b2f90404full;
    for (const auto& p : parameters()) {
        const std::uint64_t t = tensor_fingerprint(p->value);
        h ^= t + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

NetParams make_generator(const GeneratorSpec& spec, Rng& rng) {
    return make_net(spec, spec.image_channels, rng);
}

NetParams make_discriminator(const DiscriminatorSpec& spec, Rng& rng) {
    return make_net(spec, 1, rng);
}

ad::Var generator_forward(const NetParams& g, const ad::Var& z, const ad::Var* prev_upsampled) {
    if (prev_upsampled == nullptr) {
        ad::Var h = body_forward(g, z);
        return ad::tanh_(conv_block_forward(g.blocks.back(), h, g.spec.pad(), false));
    }
    if (!z->value.same_shape((*prev_upsampled)->value))
        throw InvalidInputError("generator_forward: z and upsampled image differ in shape");
    ad::Var input = ad::add(z, *prev_upsampled);
    ad::Var h = body_forward(g, input);
    ad::Var res = ad::tanh_(conv_block_forward(g.blocks.back(), h, g.spec.pad(), false));
    return ad::add(*prev_upsampled, res);
}

ad::Var discriminator_body(const NetParams& d, const ad::Var& image) {
    return body_forward(d, image);
}

ad::Var discriminator_tail(const NetParams& d, const ad::Var& embedding_input) {
    return conv_block_forward(d.blocks.back(), embedding_input, d.spec.pad(), false);
}

ad::Var discriminator_forward(const NetParams& d, const ad::Var& image,
                              const ad::Var* inject_at_embedding) {
    ad::Var h = discriminator_body(d, image);
    if (inject_at_embedding != nullptr) {
        if (!(*inject_at_embedding)->value.same_shape(h->value))
            throw InvalidInputError(
                "discriminator_forward: embedding perturbation shape mismatch");
        h = ad::add(h, *inject_at_embedding);
    }
    return discriminator_tail(d, h);
}

std::vector<std::pair<double, double>> layer_norms(const NetParams& params, int h, int w,
                                                   int iters, double tol) {
    std::vector<std::pair<double, double>> out;
    out.reserve(params.blocks.size());
    for (int i = 0; i < params.depth(); ++i)
        out.push_back(params.layer_norms_at(i, h, w, iters, tol));
    return out;
}

}  // namespace msgan
