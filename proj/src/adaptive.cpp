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

#include "msgan/adaptive.hpp"

#include "msgan/common.hpp"
#include "msgan/spectral.hpp"

namespace msgan {

std::string to_string(AttackDecision::Choice c) {
    return c == AttackDecision::Choice::pgd ? "pgd" : "fgm";
}

double compute_w_sigma(const NetParams& params, AttackSite /*site*/, int h, int w,
                       int iters, double tol, Tensor* warm_start) {
    if (params.blocks.empty()) throw InvalidInputError("compute_w_sigma: empty params");
    // the attack surface is the embedding (last) layer for both sites
    ConvOperator op(params.blocks.back().w->value, h, w, params.spec.pad());
    return spectral_norm(op, iters, tol, warm_start);
}

double WSigmaTracker::value(const NetParams& params, AttackSite site, int h, int w,
                            long step) {
    if (last_step_ < 0 || step - last_step_ >= refresh_every_) {
        cached_ = compute_w_sigma(params, site, h, w, 100, 1e-9, &warm_);
        last_step_ = step;
    }
    return cached_;
}

AttackDecision decide(double w_sigma, double kappa, double alpha, long step) {
    if (kappa <= 0.0) throw InvalidInputError("decide: kappa must be positive");
    if (alpha <= 0.0) throw InvalidInputError("decide: alpha must be positive");
    AttackDecision d;
    d.w_sigma = w_sigma;
    d.kappa = kappa;
    d.alpha = alpha;
    d.threshold = kappa / (2.0 * alpha);
    d.step_index = step;
    d.chosen = (w_sigma < d.threshold) ? AttackDecision::Choice::pgd
                                       : AttackDecision::Choice::fgm;
    return d;
}

AdaptiveStepResult adaptive_step(const LossGradFn& loss_grad, const Tensor& x,
                                 const NetParams& d_params, const AttackConfig& cfg,
                                 KappaEstimator& kappa_est, WSigmaTracker& tracker,
                                 long step, int scale_index) {
    AdaptiveStepResult res;
    Tensor g = loss_grad(x);
    if (!g.all_finite()) throw NumericError("adaptive_step: non-finite gradient");
    res.grad_norm = g.l2_norm();
    kappa_est.update(res.grad_norm);  // observe before deciding

    // w_sigma at the embedding layer's input spatial size; stride-1
    // same-padding keeps it equal to the image size for input-site attacks
    const int h = x.dim(x.ndim() - 2), w = x.dim(x.ndim() - 1);
    const double w_sigma = tracker.value(d_params, cfg.site, h, w, step);

    res.decision = decide(w_sigma, kappa_est.estimate(), cfg.step_alpha, step);
    res.decision.scale_index = scale_index;
    if (res.decision.chosen == AttackDecision::Choice::pgd)
        res.perturbation = pgd_attack(loss_grad, x, cfg);
    else
        res.perturbation = fgm_perturb(g, cfg.radius);
    return res;
}

}  // namespace msgan
