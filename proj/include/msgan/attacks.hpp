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

#include <deque>
#include <functional>
#include <string>

#include "msgan/tensor.hpp"

namespace msgan {

enum class AttackMode { none, fgm, pgd, adaptive };
enum class AttackSite { input, embedding };

AttackMode attack_mode_from_string(const std::string& s);
std::string to_string(AttackMode m);
AttackSite attack_site_from_string(const std::string& s);
std::string to_string(AttackSite s);

/// L2-ball attack configuration. step_alpha is the PGD step size (the alpha
/// of the switching threshold kappa/(2*alpha)); steps*step_alpha should reach
/// the radius.
struct AttackConfig {
    AttackMode mode = AttackMode::adaptive;
    double radius = 1.0;
    double step_alpha = 0.35;
    int steps = 3;
    AttackSite site = AttackSite::input;
    int kappa_window = 50;
    double kappa_floor = 1e-8;
    int w_sigma_refresh = 10;
};

/// Gradient oracle for attacks: returns grad_x loss at x.
using LossGradFn = std::function<Tensor(const Tensor& x)>;

/// Closed-form L2 argmax: r * grad / ||grad||; zero when the gradient
/// effectively vanishes.
Tensor fgm_perturb(const Tensor& grad, double r_adv);

/// Projection onto the closed L2 ball of radius r_adv.
Tensor project_ball(const Tensor& eps, double r_adv);

/// Projected gradient iteration from eps_0 = 0: normalized-gradient steps of
/// size step_alpha, each projected back onto the ball. A vanished gradient
/// skips the step and continues.
Tensor pgd_attack(const LossGradFn& loss_grad, const Tensor& x, const AttackConfig& cfg);

/// Windowed running minimum of observed input-gradient norms, floored; the
/// online estimate of the theorems' lower bound on ||grad_x loss||.
class KappaEstimator {
public:
    KappaEstimator(int window, double floor) : window_(window), floor_(floor) {}

    void update(double grad_norm);
    double estimate() const;
    int window() const { return window_; }
    double floor() const { return floor_; }

private:
    int window_;
    double floor_;
    std::deque<double> norms_;
};

}  // namespace msgan
