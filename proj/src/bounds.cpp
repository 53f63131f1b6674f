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

#include "msgan/bounds.hpp"

#include <cmath>

#include "msgan/common.hpp"

namespace msgan {

double f_fgm(const BoundTerms& terms, double r_adv) {
    if (terms.kappa <= 0.0) throw InvalidInputError("f_fgm: kappa must be positive");
    if (terms.B <= 0.0) throw InvalidInputError("f_fgm: B must be positive");
    const double wd = terms.W_dot;
    const double inner = wd + (r_adv / terms.kappa) * wd * (1.0 / terms.B + wd);
    return inner * inner * terms.W_check;
}

double lip_bar(std::span<const double> layer_spectral_norms) {
    double w_dot = 1.0;
    for (double s : layer_spectral_norms) w_dot *= s;
    double sum = 0.0, prefix = 1.0;
    for (double s : layer_spectral_norms) {
        prefix *= s;
        sum += prefix;
    }
    return w_dot * sum;
}

double f_pgd(const BoundTerms& terms, double /*r_adv*/, int t, double alpha,
             bool* pole_flag) {
    if (terms.kappa <= 0.0) throw InvalidInputError("f_pgd: kappa must be positive");
    if (t < 0) throw InvalidInputError("f_pgd: t must be non-negative");
    if (pole_flag) *pole_flag = false;

    const double kappa = terms.kappa;
    const double q = (2.0 * alpha / kappa) * terms.lip_bar;
    // (1 - q^t) / (kappa (1 - q)) is the finite geometric sum
    // (1/kappa) * sum_{i<t} q^i; evaluate it as such near the q = 1 pole.
    double ratio;
    if (std::fabs(kappa - 2.0 * alpha * terms.lip_bar) < 1e-9 * kappa) {
        if (pole_flag) *pole_flag = true;
        double sum = 0.0, qi = 1.0;
        for (int i = 0; i < t; ++i) {
            sum += qi;
            qi *= q;
        }
        ratio = sum / kappa;
    } else {
        ratio = (1.0 - std::pow(q, t)) / (kappa - 2.0 * alpha * terms.lip_bar);
    }
    const double wd = terms.W_dot;
    return ratio * ratio * wd * (1.0 + wd) * terms.W_check;
}

double margin_loss(std::span<const double> scores, std::span<const int> labels,
                   double gamma) {
    if (scores.empty()) throw InvalidInputError("margin_loss: empty score set");
    if (scores.size() != labels.size())
        throw InvalidInputError("margin_loss: scores/labels size mismatch");
    if (gamma < 0.0) throw InvalidInputError("margin_loss: gamma must be >= 0");
    long violations = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        const double signed_score = labels[i] >= 0 ? scores[i] : -scores[i];
        if (signed_score <= gamma) ++violations;
    }
    return double(violations) / double(scores.size());
}

double rhs(const BoundTerms& terms, double f_value, double r_adv) {
    const double br = terms.B + r_adv;
    const double dh = double(terms.d) * double(terms.h);
    const double num = br * br * double(terms.d) * double(terms.d) * double(terms.h) *
                           std::log(dh) * f_value +
                       std::log(double(terms.m) / terms.beta);
    return std::sqrt(num / (terms.gamma * terms.gamma * double(terms.m)));
}

std::pair<double, double> rademacher_factor(double q, int d_dim, long n, double eps) {
    if (q <= 0.0 || d_dim < 1 || n < 1 || eps < 0.0)
        throw InvalidInputError("rademacher_factor: invalid arguments");
    const double clean = 2.0 * q * std::sqrt(2.0 * std::log(2.0 * double(d_dim)) / double(n));
    return {clean, (1.0 + eps) * clean};
}

std::pair<double, long> patch_stats(const Tensor& image, int receptive_field) {
    if (image.ndim() != 3) throw InvalidInputError("patch_stats: expected (C,H,W)");
    const int c = image.dim(0), h = image.dim(1), w = image.dim(2);
    const int half = receptive_field / 2;
    double max_norm2 = 0.0;
    for (int cy = 0; cy < h; ++cy)
        for (int cx = 0; cx < w; ++cx) {
            double acc = 0.0;
            for (int ch = 0; ch < c; ++ch)
                for (int dy = -half; dy <= half; ++dy) {
                    const int y = cy + dy;
                    if (y < 0 || y >= h) continue;
                    for (int dx = -half; dx <= half; ++dx) {
                        const int x = cx + dx;
                        if (x < 0 || x >= w) continue;
                        const double v = image.at3(ch, y, x);
                        acc += v * v;
                    }
                }
            max_norm2 = std::max(max_norm2, acc);
        }
    return {std::sqrt(max_norm2), long(h) * long(w)};
}

BoundTerms compute_bound_terms(const NetParams& net, const Tensor& real_image, int img_h,
                               int img_w, double kappa, double gamma, double beta) {
    BoundTerms terms;
    terms.d = net.depth();
    terms.h = net.embedding_units();
    terms.kappa = kappa;
    terms.gamma = gamma;
    terms.beta = beta;

    std::vector<double> spectral;
    terms.W_dot = 1.0;
    terms.W_check = 0.0;
    for (int i = 0; i < net.depth(); ++i) {
        auto [sn, fn] = net.layer_norms_at(i, img_h, img_w, 100, 1e-10);
        spectral.push_back(sn);
        terms.W_dot *= sn;
        if (sn > 0.0) terms.W_check += (fn * fn) / (sn * sn);
    }
    terms.lip_bar = lip_bar(spectral);

    // receptive field of a stack of d kxk stride-1 convs
    const int k = net.spec.kernel;
    const int rf = 1 + net.depth() * (k - 1);
    auto [b, m] = patch_stats(real_image, rf);
    terms.B = std::max(b, 1e-12);
    terms.m = m;
    return terms;
}

}  // namespace msgan
