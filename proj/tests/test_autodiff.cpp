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

#include <doctest.h>

#include <cmath>

#include "msgan/autodiff.hpp"
#include "msgan/conv_kernels.hpp"
#include "msgan/rng.hpp"
#include "test_util.hpp"

using namespace msgan;
namespace ts = msgan::test;

namespace {

// Independent dead-simple convolution, the oracle for the GEMM path.
Tensor naive_conv2d(const Tensor& x, const Tensor& w, int stride, int pad) {
    const int n = x.dim(0), ci = x.dim(1), h = x.dim(2), wd = x.dim(3);
    const int o = w.dim(0), kh = w.dim(2), kw = w.dim(3);
    const int ho = (h + 2 * pad - kh) / stride + 1;
    const int wo = (wd + 2 * pad - kw) / stride + 1;
    Tensor y({n, o, ho, wo});
    for (int s = 0; s < n; ++s)
        for (int oc = 0; oc < o; ++oc)
            for (int oy = 0; oy < ho; ++oy)
                for (int ox = 0; ox < wo; ++ox) {
                    double acc = 0.0;
                    for (int c = 0; c < ci; ++c)
                        for (int i = 0; i < kh; ++i)
                            for (int j = 0; j < kw; ++j) {
                                const int iy = oy * stride - pad + i;
                                const int ix = ox * stride - pad + j;
                                if (iy < 0 || iy >= h || ix < 0 || ix >= wd) continue;
                                acc += x.at4(s, c, iy, ix) * w.at4(oc, c, i, j);
                            }
                    y.at4(s, oc, oy, ox) = acc;
                }
    return y;
}

}  // namespace

TEST_CASE("conv2d matches the naive oracle") {
    Rng rng(7);
    for (int trial = 0; trial < 3; ++trial) {
        Tensor x = rng.normal_tensor({2, 3, 9, 7});
        Tensor w = rng.normal_tensor({4, 3, 3, 3});
        Tensor got = conv2d_val(x, w, 1, 1);
        Tensor want = naive_conv2d(x, w, 1, 1);
        CHECK(ts::max_abs_diff(got, want) < 1e-12);
    }
    // strided/valid variant (feature extractor path)
    Tensor x = rng.normal_tensor({1, 3, 11, 11});
    Tensor w = rng.normal_tensor({5, 3, 3, 3});
    CHECK(ts::max_abs_diff(conv2d_val(x, w, 2, 0), naive_conv2d(x, w, 2, 0)) < 1e-12);
}

TEST_CASE("conv2d_transpose_val is the exact adjoint") {
    Rng rng(11);
    Tensor w = rng.normal_tensor({4, 3, 3, 3});
    Tensor x = rng.normal_tensor({1, 3, 6, 5});
    Tensor u = rng.normal_tensor({1, 4, 6, 5});
    Tensor ax = conv2d_val(x, w, 1, 1);
    Tensor au = conv2d_transpose_val(u, w, 1);
    double lhs = 0.0, rhs = 0.0;  // <A x, u> == <x, A^T u>
    for (std::int64_t i = 0; i < ax.numel(); ++i) lhs += ax[i] * u[i];
    for (std::int64_t i = 0; i < x.numel(); ++i) rhs += x[i] * au[i];
    CHECK(ts::rel_err(lhs, rhs) < 1e-12);
}

TEST_CASE("first-order gradients match finite differences") {
    Rng rng(23);
    Tensor x0 = rng.normal_tensor({1, 2, 5, 5});
    Tensor w0 = rng.normal_tensor({3, 2, 3, 3}, 0.5);
    Tensor g0 = rng.normal_tensor({3});

    // scalar = sum(tanh(conv(relu(x), w) + bias)^2): exercises conv, relu,
    // tanh, broadcast and reductions in one graph
    auto eval = [&](const Tensor& xv, const Tensor& wv, const Tensor& gv) {
        ad::Var x = ad::leaf(xv);
        ad::Var w = ad::leaf(wv);
        ad::Var gamma = ad::leaf(gv);
        ad::Var y = ad::conv2d(ad::relu(x), w, 1);
        y = ad::add(y, ad::channel_expand(gamma, y->value.shape()));
        y = ad::tanh_(y);
        return ad::sum_all(ad::mul(y, y));
    };

    ad::Var x = ad::leaf(x0), w = ad::leaf(w0), gamma = ad::leaf(g0);
    ad::Var y = ad::conv2d(ad::relu(x), w, 1);
    y = ad::add(y, ad::channel_expand(gamma, y->value.shape()));
    y = ad::tanh_(y);
    ad::Var root = ad::sum_all(ad::mul(y, y));
    ad::Grads grads = ad::backward(root);

    auto fd_x = ts::finite_diff(
        [&](const Tensor& t) { return eval(t, w0, g0)->value[0]; }, x0);
    auto fd_w = ts::finite_diff(
        [&](const Tensor& t) { return eval(x0, t, g0)->value[0]; }, w0);
    auto fd_g = ts::finite_diff(
        [&](const Tensor& t) { return eval(x0, w0, t)->value[0]; }, g0);

    CHECK(ts::max_abs_diff(grads.value_or_zero(x), fd_x) < 1e-6);
    CHECK(ts::max_abs_diff(grads.value_or_zero(w), fd_w) < 1e-6);
    CHECK(ts::max_abs_diff(grads.value_or_zero(gamma), fd_g) < 1e-6);
}

TEST_CASE("second-order: gradient-norm penalties differentiate correctly") {
    Rng rng(31);
    Tensor x0 = rng.normal_tensor({1, 2, 4, 4});
    Tensor w0 = rng.normal_tensor({1, 2, 3, 3}, 0.5);

    // penalty(w) = (|| d/dx sum(conv(x, w)) ||_2 - 1)^2, the GP shape
    auto penalty = [&](const Tensor& wv) {
        ad::Var x = ad::leaf(x0, /*requires_grad=*/true);
        ad::Var w = ad::leaf(wv);
        ad::Var s = ad::sum_all(ad::conv2d(x, w, 1));
        ad::Grads inner = ad::backward(s, /*create_graph=*/true);
        ad::Var g = inner.at(x);
        ad::Var nrm = ad::sample_l2_norm(g);
        ad::Var pen = ad::mean_all(ad::mul(ad::add_scalar(nrm, -1.0), ad::add_scalar(nrm, -1.0)));
        return pen;
    };

    ad::Var pen = penalty(w0);
    // find w leaf through the graph: rebuild with a handle instead
    ad::Var x = ad::leaf(x0, true);
    ad::Var w = ad::leaf(w0);
    ad::Var s = ad::sum_all(ad::conv2d(x, w, 1));
    ad::Grads inner = ad::backward(s, true);
    ad::Var nrm = ad::sample_l2_norm(inner.at(x));
    ad::Var root =
        ad::mean_all(ad::mul(ad::add_scalar(nrm, -1.0), ad::add_scalar(nrm, -1.0)));
    CHECK(root->value[0] == doctest::Approx(pen->value[0]));

    ad::Grads outer = ad::backward(root);
    Tensor analytic = outer.value_or_zero(w);
    Tensor fd = ts::finite_diff([&](const Tensor& t) { return penalty(t)->value[0]; }, w0);
    CHECK(ts::max_rel_diff(analytic, fd, 1e-4) < 1e-5);
}

TEST_CASE("second-order through relu nonlinearity (a.e. correctness)") {
    Rng rng(37);
    Tensor x0 = rng.normal_tensor({1, 1, 4, 4});
    Tensor w0 = rng.normal_tensor({2, 1, 3, 3}, 0.7);

    auto sqnorm = [&](const Tensor& wv) {
        ad::Var x = ad::leaf(x0, true);
        ad::Var w = ad::leaf(wv);
        ad::Var s = ad::sum_all(ad::relu(ad::conv2d(x, w, 1)));
        ad::Grads inner = ad::backward(s, true);
        ad::Var g = inner.at(x);
        return ad::sum_all(ad::mul(g, g));
    };

    ad::Var x = ad::leaf(x0, true);
    ad::Var w = ad::leaf(w0);
    ad::Var s = ad::sum_all(ad::relu(ad::conv2d(x, w, 1)));
    ad::Grads inner = ad::backward(s, true);
    ad::Var g = inner.at(x);
    ad::Grads outer = ad::backward(ad::sum_all(ad::mul(g, g)));

    Tensor fd =
        ts::finite_diff([&](const Tensor& t) { return sqnorm(t)->value[0]; }, w0, 1e-6);
    CHECK(ts::max_rel_diff(outer.value_or_zero(w), fd, 1e-3) < 1e-4);
}

TEST_CASE("no-grad mode builds no graph") {
    Rng rng(41);
    ad::Var w = ad::leaf(rng.normal_tensor({1, 1, 3, 3}));
    ad::NoGradGuard guard;
    ad::Var x = ad::constant(rng.normal_tensor({1, 1, 4, 4}));
    ad::Var y = ad::conv2d(x, w, 1);
    CHECK_FALSE(y->requires_grad);
    CHECK(y->parents.empty());
}

TEST_CASE("backward calls never contaminate each other") {
    Tensor x0 = Tensor::full({2}, 3.0);
    ad::Var x = ad::leaf(x0);
    ad::Var y = ad::sum_all(ad::mul(x, x));
    ad::Grads g1 = ad::backward(y);
    ad::Grads g2 = ad::backward(y);
    CHECK(ts::max_abs_diff(g1.value_or_zero(x), g2.value_or_zero(x)) == 0.0);
    CHECK(g1.value_or_zero(x)[0] == doctest::Approx(6.0));
}
