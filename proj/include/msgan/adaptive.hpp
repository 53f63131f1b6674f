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

#include "msgan/attacks.hpp"
#include "msgan/model.hpp"

namespace msgan {

/// One per-step choice between the attacks, with the evidence that drove it.
struct AttackDecision {
    enum class Choice { fgm, pgd };
    Choice chosen = Choice::fgm;
    double w_sigma = 0.0;
    double kappa = 0.0;
    double alpha = 0.0;
    double threshold = 0.0;  // kappa / (2 * alpha)
    long step_index = 0;
    int scale_index = 0;
};

std::string to_string(AttackDecision::Choice c);

/// Spectral norm of the embedding (last) layer weight, the switching metric.
/// The unrolled conv operator is evaluated at the given spatial size.
double compute_w_sigma(const NetParams& params, AttackSite site, int h, int w,
                       int iters = 100, double tol = 1e-9, Tensor* warm_start = nullptr);

/// Caches w_sigma between refreshes; power iteration warm-starts from the
/// previous right vector since the norm drifts slowly under training.
class WSigmaTracker {
public:
    explicit WSigmaTracker(int refresh_every) : refresh_every_(refresh_every) {}

    double value(const NetParams& params, AttackSite site, int h, int w, long step);
    void invalidate() { last_step_ = -1; }

private:
    int refresh_every_;
    long last_step_ = -1;
    double cached_ = 0.0;
    Tensor warm_;
};

/// PGD when w_sigma < kappa/(2 alpha), strictly; ties go to FGM.
AttackDecision decide(double w_sigma, double kappa, double alpha, long step);

struct AdaptiveStepResult {
    Tensor perturbation;
    AttackDecision decision;
    double grad_norm = 0.0;  // ||grad_x loss|| at the clean point
};

/// One controller step: observe the clean-input gradient, feed the kappa
/// estimator, read w_sigma, decide, then run the chosen attack. Touches no
/// parameters or optimizer state.
AdaptiveStepResult adaptive_step(const LossGradFn& loss_grad, const Tensor& x,
                                 const NetParams& d_params, const AttackConfig& cfg,
                                 KappaEstimator& kappa_est, WSigmaTracker& tracker,
                                 long step, int scale_index);

}  // namespace msgan
