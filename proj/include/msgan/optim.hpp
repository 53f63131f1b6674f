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

#include <cmath>
#include <vector>

#include "msgan/autodiff.hpp"
#include "msgan/tensor.hpp"

namespace msgan {

/// Plain Adam over a fixed list of leaf variables.
class Adam {
public:
    Adam(std::vector<ad::Var> params, double lr, double beta1, double beta2,
         double eps = 1e-8)
        : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
        for (const auto& p : params_) {
            m_.emplace_back(Tensor::zeros(p->value.shape()));
            v_.emplace_back(Tensor::zeros(p->value.shape()));
        }
    }

    void step(const ad::Grads& grads) {
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, t_);
        const double bc2 = 1.0 - std::pow(beta2_, t_);
        for (size_t i = 0; i < params_.size(); ++i) {
            Tensor g = grads.value_or_zero(params_[i]);
            double* pm = m_[i].data();
            double* pv = v_[i].data();
            double* pp = params_[i]->value.data();
            const double* pg = g.data();
            for (std::int64_t j = 0; j < g.numel(); ++j) {
                pm[j] = beta1_ * pm[j] + (1.0 - beta1_) * pg[j];
                pv[j] = beta2_ * pv[j] + (1.0 - beta2_) * pg[j] * pg[j];
                const double mhat = pm[j] / bc1;
                const double vhat = pv[j] / bc2;
                pp[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
            }
        }
    }

    double lr() const { return lr_; }
    long steps_taken() const { return t_; }

private:
    std::vector<ad::Var> params_;
    std::vector<Tensor> m_, v_;
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
};

}  // namespace msgan
