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

#include "msgan/losses.hpp"

#include <cmath>

#include "msgan/common.hpp"

namespace msgan {

WganGpResult wgan_gp_loss(const Critic& critic, const ad::Var& real, const ad::Var& fake,
                          double lambda_gp, Rng& rng) {
    if (!real->value.same_shape(fake->value))
        throw InvalidInputError("wgan_gp_loss: real/fake shape mismatch");

    WganGpResult res;
    ad::Var s_real = critic(real);
    ad::Var s_fake = critic(fake);
    res.g_loss_term = ad::neg(ad::mean_all(s_fake));
    ad::Var d_main = ad::sub(ad::mean_all(s_fake), ad::mean_all(s_real));

    if (lambda_gp == 0.0) {
        res.d_loss = d_main;
        return res;
    }

    // interpolates, one u per sample
    const int n = real->value.dim(0);
    Tensor xh = real->value;
    const std::int64_t per = xh.numel() / n;
    for (int s = 0; s < n; ++s) {
        const double u = rng.uniform();
        for (std::int64_t i = 0; i < per; ++i) {
            const std::int64_t k = s * per + i;
            xh[k] = u * real->value[k] + (1.0 - u) * fake->value[k];
        }
    }
    ad::Var x_hat = ad::leaf(std::move(xh), /*requires_grad=*/true);
    ad::Var s_hat = critic(x_hat);
    ad::Grads inner = ad::backward(ad::sum_all(s_hat), /*create_graph=*/true);
    ad::Var grad = inner.at(x_hat);
    ad::Var nrm = ad::sample_l2_norm(grad);
    ad::Var gp = ad::mean_all(ad::mul(ad::add_scalar(nrm, -1.0), ad::add_scalar(nrm, -1.0)));
    res.gp_value = gp->value[0];
    res.d_loss = ad::add(d_main, ad::scale(gp, lambda_gp));
    return res;
}

ad::Var reconstruction_loss(const ad::Var& chain_output, const Tensor& target) {
    if (!chain_output->value.same_shape(target))
        throw InvalidInputError("reconstruction_loss: shape mismatch");
    ad::Var diff = ad::sub(chain_output, ad::constant(target));
    return ad::sum_all(ad::mul(diff, diff));
}

std::pair<ad::Var, ad::Var> total_objective(const ad::Var& d_loss, const ad::Var& g_loss_term,
                                            const ad::Var& rec, const LossWeights& weights) {
    if (!std::isfinite(d_loss->value[0]) || !std::isfinite(g_loss_term->value[0]) ||
        !std::isfinite(rec->value[0]))
        throw NumericError("total_objective: non-finite loss term");
    ad::Var g_obj = ad::add(g_loss_term, ad::scale(rec, weights.alpha_rec));
    return {d_loss, g_obj};
}

}  // namespace msgan
