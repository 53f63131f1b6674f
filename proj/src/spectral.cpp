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

#include "msgan/spectral.hpp"

#include <cmath>

#include "msgan/common.hpp"
#include "msgan/conv_kernels.hpp"
#include "msgan/rng.hpp"

namespace msgan {

void DenseOperator::apply(const double* x, double* y) const {
    Eigen::Map<const Eigen::VectorXd> xv(x, m_.cols());
    Eigen::Map<Eigen::VectorXd> yv(y, m_.rows());
    yv.noalias() = m_ * xv;
}

void DenseOperator::apply_adjoint(const double* y, double* x) const {
    Eigen::Map<const Eigen::VectorXd> yv(y, m_.rows());
    Eigen::Map<Eigen::VectorXd> xv(x, m_.cols());
    xv.noalias() = m_.transpose() * yv;
}

ConvOperator::ConvOperator(Tensor kernel, int in_h, int in_w, int pad)
    : kernel_(std::move(kernel)), in_h_(in_h), in_w_(in_w), pad_(pad) {
    if (kernel_.ndim() != 4) throw InvalidInputError("ConvOperator: kernel must be rank 4");
}

std::int64_t ConvOperator::domain_size() const {
    return std::int64_t(kernel_.dim(1)) * in_h_ * in_w_;
}

std::int64_t ConvOperator::range_size() const {
    const int ho = in_h_ + 2 * pad_ - kernel_.dim(2) + 1;
    const int wo = in_w_ + 2 * pad_ - kernel_.dim(3) + 1;
    return std::int64_t(kernel_.dim(0)) * ho * wo;
}

void ConvOperator::apply(const double* x, double* y) const {
    Tensor xt({1, kernel_.dim(1), in_h_, in_w_});
    std::copy(x, x + xt.numel(), xt.data());
    Tensor yt = conv2d_val(xt, kernel_, 1, pad_);
    std::copy(yt.data(), yt.data() + yt.numel(), y);
}

void ConvOperator::apply_adjoint(const double* y, double* x) const {
    const int ho = in_h_ + 2 * pad_ - kernel_.dim(2) + 1;
    const int wo = in_w_ + 2 * pad_ - kernel_.dim(3) + 1;
    Tensor yt({1, kernel_.dim(0), ho, wo});
    std::copy(y, y + yt.numel(), yt.data());
    // adjoint of zero-padded stride-1 conv: correlate with the flip-swapped
    // kernel at complementary padding
    Tensor xt({1, kernel_.dim(1), in_h_, in_w_});
    const int kh = kernel_.dim(2), kw = kernel_.dim(3);
    const int o = kernel_.dim(0), c = kernel_.dim(1);
    Tensor fs({c, o, kh, kw});
    for (int oc = 0; oc < o; ++oc)
        for (int ic = 0; ic < c; ++ic)
            for (int i = 0; i < kh; ++i)
                for (int j = 0; j < kw; ++j)
                    fs.at4(ic, oc, i, j) = kernel_.at4(oc, ic, kh - 1 - i, kw - 1 - j);
    Tensor res = conv2d_val(yt, fs, 1, kh - 1 - pad_);
    std::copy(res.data(), res.data() + res.numel(), x);
}

double spectral_norm(const LinearOperator& op, int iters, double tol, Tensor* warm_start) {
    const std::int64_t n = op.domain_size(), m = op.range_size();
    if (n == 0 || m == 0) return 0.0;

    Tensor v({static_cast<int>(n)});
    bool seeded = false;
    if (warm_start && warm_start->numel() == n) {
        v = *warm_start;
        seeded = v.l2_norm() > 0.0;
    }
    if (!seeded) {
        Rng rng(0x5eed5eed5eedull);  // fixed start: reports are reproducible
        for (std::int64_t i = 0; i < n; ++i) v[i] = rng.normal();
    }
    double vn = v.l2_norm();
    if (vn == 0.0) return 0.0;
    for (std::int64_t i = 0; i < n; ++i) v[i] /= vn;

    Tensor u({static_cast<int>(m)});
    double sigma = 0.0, prev = -1.0;
    for (int it = 0; it < iters; ++it) {
        op.apply(v.data(), u.data());
        sigma = u.l2_norm();
        if (sigma == 0.0) return 0.0;  // zero operator (or v in its null space)
        op.apply_adjoint(u.data(), v.data());
        const double wn = v.l2_norm();
        if (wn == 0.0) break;
        for (std::int64_t i = 0; i < n; ++i) v[i] /= wn;
        if (prev >= 0.0 && std::fabs(sigma - prev) <= tol * std::max(sigma, 1e-300)) break;
        prev = sigma;
    }
    if (warm_start) *warm_start = v;
    return sigma;
}

Eigen::MatrixXd materialize(const LinearOperator& op) {
    const std::int64_t n = op.domain_size(), m = op.range_size();
    Eigen::MatrixXd mat(m, n);
    std::vector<double> e(static_cast<size_t>(n), 0.0), col(static_cast<size_t>(m));
    for (std::int64_t j = 0; j < n; ++j) {
        e[static_cast<size_t>(j)] = 1.0;
        op.apply(e.data(), col.data());
        for (std::int64_t i = 0; i < m; ++i) mat(i, j) = col[static_cast<size_t>(i)];
        e[static_cast<size_t>(j)] = 0.0;
    }
    return mat;
}

}  // namespace msgan
