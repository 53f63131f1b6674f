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

#include <span>
#include <vector>

#include "msgan/model.hpp"
#include "msgan/spectral.hpp"

namespace msgan {

/// Everything the generalization-bound formulas consume. W_dot is the product
/// of layer spectral norms, W_check the sum of squared Frobenius-to-spectral
/// ratios, lip_bar the Lipschitz bound on the loss gradient. B bounds the
/// input patch norm, m counts patch positions, h the embedding-layer units.
struct BoundTerms {
    double W_dot = 0.0;
    double W_check = 0.0;
    double lip_bar = 0.0;
    int d = 0;
    int h = 0;
    double B = 0.0;
    double kappa = 0.0;
    double gamma = 0.0;
    double beta = 0.0;
    long m = 0;
};

/// One logged row of bound diagnostics per (scale, step).
struct BoundReport {
    int scale_index = 0;
    long step = 0;
    BoundTerms terms;
    double r_adv = 0.0;
    double alpha = 0.0;
    int t = 0;
    double F_fgm = 0.0;
    double F_pgd = 0.0;
    double rhs_fgm = 0.0;
    double rhs_pgd = 0.0;
    double margin_loss_clean = 0.0;
    double margin_loss_adv = 0.0;
    bool pgd_pole_flag = false;
};

/// Bound factor of the FGM attack: {Wdot + (r/kappa) Wdot (1/B + Wdot)}^2 Wcheck.
double f_fgm(const BoundTerms& terms, double r_adv);

/// lip-bar = Wdot * sum_i prod_{j<=i} ||W_j||_2 over the layer spectral norms.
double lip_bar(std::span<const double> layer_spectral_norms);

/// Bound factor of the PGD attack with t steps of size alpha:
/// {(1 - q^t) / (kappa - 2 alpha lip_bar)}^2 Wdot (1 + Wdot) Wcheck with
/// q = (2 alpha / kappa) lip_bar. Near the q = 1 pole the ratio is evaluated
/// as the finite geometric sum it encodes; `pole_flag` reports when that
/// fallback fired.
double f_pgd(const BoundTerms& terms, double r_adv, int t, double alpha,
             bool* pole_flag = nullptr);

/// Patch-critic margin loss: fraction of patches whose signed score toward
/// the true label fails to clear gamma. labels: +1 real, -1 fake.
double margin_loss(std::span<const double> scores, std::span<const int> labels, double gamma);

/// The square-root term of the bounds with the O(.) constant taken as 1:
/// sqrt( ((B+r)^2 d^2 h log(d h) F + log(m/beta)) / (gamma^2 m) ).
/// A relative training diagnostic, not a certified risk value.
double rhs(const BoundTerms& terms, double f_value, double r_adv);

/// Rademacher scaling pair: clean = 2 Q sqrt(2 ln(2 d) / n) and the
/// (1 + eps)-scaled adversarial variant.
std::pair<double, double> rademacher_factor(double q, int d_dim, long n, double eps);

/// Fills the norm-derived terms from a network at spatial size (h, w), plus
/// B and m measured from the real image patches at the critic's receptive
/// field. kappa/gamma/beta are supplied by the caller.
BoundTerms compute_bound_terms(const NetParams& net, const Tensor& real_image, int img_h,
                               int img_w, double kappa, double gamma, double beta);

/// Max L2 norm over all receptive-field patches (zero padding at borders) and
/// the patch-position count m.
std::pair<double, long> patch_stats(const Tensor& image, int receptive_field);

}  // namespace msgan
