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

#include <functional>
#include <utility>

#include "msgan/autodiff.hpp"
#include "msgan/rng.hpp"

namespace msgan {

struct LossWeights {
    double alpha_rec = 10.0;  // reconstruction weight; 100 in super-resolution mode
    double lambda_gp = 0.1;   // gradient-penalty weight
};

/// A critic evaluated on a batch, returning a per-patch score map.
using Critic = std::function<ad::Var(const ad::Var&)>;

struct WganGpResult {
    ad::Var d_loss;       // mean D(fake) - mean D(real) + lambda_gp * gp
    ad::Var g_loss_term;  // -mean D(fake)
    double gp_value = 0.0;
};

/// WGAN-GP loss. The penalty interpolates x_hat = u*real + (1-u)*fake with
/// one uniform u per sample and pushes the per-sample input-gradient norm of
/// the summed score toward 1. The gradient graph is kept so the penalty is
/// differentiable w.r.t. the critic parameters.
WganGpResult wgan_gp_loss(const Critic& critic, const ad::Var& real, const ad::Var& fake,
                          double lambda_gp, Rng& rng);

/// Squared L2 over all pixels and channels (a sum, not a mean).
ad::Var reconstruction_loss(const ad::Var& chain_output, const Tensor& target);

/// (d_objective, g_objective); the reconstruction term enters the generator
/// objective only.
std::pair<ad::Var, ad::Var> total_objective(const ad::Var& d_loss, const ad::Var& g_loss_term,
                                            const ad::Var& rec, const LossWeights& weights);

}  // namespace msgan
