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

#include "msgan/attacks.hpp"

#include <algorithm>
#include <cmath>

#include "msgan/common.hpp"

namespace msgan {

namespace {
constexpr double kVanishedGrad = 1e-12;
}

AttackMode attack_mode_from_string(const std::string& s) {
    if (s == "none") return AttackMode::none;
    if (s == "fgm") return AttackMode::fgm;
    if (s == "pgd") return AttackMode::pgd;
    if (s == "adaptive") return AttackMode::adaptive;
    throw ConfigError("unknown attack mode: " + s);
}

std::string to_string(AttackMode m) {
    switch (m) {
        case AttackMode::none: return "none";
        case AttackMode::fgm: return "fgm";
        case AttackMode::pgd: return "pgd";
        case AttackMode::adaptive: return "adaptive";
    }
    return "?";
}

AttackSite attack_site_from_string(const std::string& s) {
    if (s == "input") return AttackSite::input;
    if (s == "embedding") return AttackSite::embedding;
    throw ConfigError("unknown attack site: " + s);
}

std::string to_string(AttackSite s) {
    return s == AttackSite::input ? "input" : "embedding";
}

Tensor fgm_perturb(const Tensor& grad, double r_adv) {
    if (!grad.all_finite()) throw NumericError("fgm_perturb: non-finite gradient");
    const double n = grad.l2_norm();
    Tensor eps(grad.shape());
    if (n < kVanishedGrad) return eps;  // argmax undefined at zero gradient
    const double s = r_adv / n;
    for (std::int64_t i = 0; i < grad.numel(); ++i) eps[i] = s * grad[i];
    return eps;
}

Tensor project_ball(const Tensor& eps, double r_adv) {
    const double n = eps.l2_norm();
    if (n <= r_adv) return eps;
    Tensor out(eps.shape());
    const double s = r_adv / n;
    for (std::int64_t i = 0; i < eps.numel(); ++i) out[i] = s * eps[i];
    return out;
}

Tensor pgd_attack(const LossGradFn& loss_grad, const Tensor& x, const AttackConfig& cfg) {
    if (cfg.steps < 1) throw InvalidInputError("pgd_attack: steps must be >= 1");
    Tensor eps = Tensor::zeros(x.shape());
    Tensor xt = x;
    for (int t = 0; t < cfg.steps; ++t) {
        for (std::int64_t i = 0; i < x.numel(); ++i) xt[i] = x[i] + eps[i];
        Tensor g = loss_grad(xt);
        if (!g.all_finite()) throw NumericError("pgd_attack: non-finite gradient");
        const double n = g.l2_norm();
        if (n < kVanishedGrad) continue;  // keep eps_t, no step
        const double s = cfg.step_alpha / n;
        for (std::int64_t i = 0; i < eps.numel(); ++i) eps[i] += s * g[i];
        eps = project_ball(eps, cfg.radius);
    }
    return eps;
}

void KappaEstimator::update(double grad_norm) {
    norms_.push_back(grad_norm);
    while (static_cast<int>(norms_.size()) > window_) norms_.pop_front();
}

double KappaEstimator::estimate() const {
    if (norms_.empty()) return floor_;
    const double m = *std::min_element(norms_.begin(), norms_.end());
    return std::max(floor_, m);
}

}  // namespace msgan
