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

#include "msgan/conv_kernels.hpp"

#include <Eigen/Core>
#include <limits>

#include "msgan/common.hpp"

namespace msgan {

namespace {

using MatXd = Eigen::MatrixXd;  // column-major
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMat>;
using RowMap = Eigen::Map<RowMat>;

// One sample: columns are output positions, rows are (c,ki,kj) taps.
void im2col(const double* x, int c_in, int h, int w, int kh, int kw, int stride, int pad,
            int ho, int wo, MatXd& cols) {
    cols.resize(c_in * kh * kw, std::int64_t(ho) * wo);
    for (int oy = 0; oy < ho; ++oy) {
        for (int ox = 0; ox < wo; ++ox) {
            double* col = cols.col(std::int64_t(oy) * wo + ox).data();
            const int iy0 = oy * stride - pad;
            const int ix0 = ox * stride - pad;
            int r = 0;
            for (int c = 0; c < c_in; ++c) {
                const double* xc = x + std::int64_t(c) * h * w;
                for (int ki = 0; ki < kh; ++ki) {
                    const int iy = iy0 + ki;
                    if (iy < 0 || iy >= h) {
                        for (int kj = 0; kj < kw; ++kj) col[r++] = 0.0;
                        continue;
                    }
                    const double* row = xc + std::int64_t(iy) * w;
                    for (int kj = 0; kj < kw; ++kj) {
                        const int ix = ix0 + kj;
                        col[r++] = (ix < 0 || ix >= w) ? 0.0 : row[ix];
                    }
                }
            }
        }
    }
}

void check4(const Tensor& t, const char* name) {
    if (t.ndim() != 4) throw InvalidInputError(std::string(name) + ": expected a rank-4 tensor");
}

// w'[c,o,i,j] = w[o,c,kh-1-i,kw-1-j]; conv with it realizes the adjoint.
Tensor flip_swap(const Tensor& w) {
    const int o = w.dim(0), c = w.dim(1), kh = w.dim(2), kw = w.dim(3);
    Tensor f({c, o, kh, kw});
    for (int oc = 0; oc < o; ++oc)
        for (int ic = 0; ic < c; ++ic)
            for (int i = 0; i < kh; ++i)
                for (int j = 0; j < kw; ++j)
                    f.at4(ic, oc, i, j) = w.at4(oc, ic, kh - 1 - i, kw - 1 - j);
    return f;
}

}  // namespace

Tensor conv2d_val(const Tensor& x, const Tensor& w, int stride, int pad) {
    check4(x, "conv2d input");
    check4(w, "conv2d kernel");
    const int n = x.dim(0), c_in = x.dim(1), h = x.dim(2), wdt = x.dim(3);
    const int o = w.dim(0), kh = w.dim(2), kw = w.dim(3);
    if (w.dim(1) != c_in)
        throw InvalidInputError("conv2d: kernel channel count does not match input");
    const int ho = (h + 2 * pad - kh) / stride + 1;
    const int wo = (wdt + 2 * pad - kw) / stride + 1;
    if (ho <= 0 || wo <= 0) throw InvalidInputError("conv2d: output would be empty");

    Tensor y({n, o, ho, wo});
    ConstRowMap wmat(w.data(), o, std::int64_t(c_in) * kh * kw);
    MatXd cols;
    for (int s = 0; s < n; ++s) {
        im2col(x.data() + std::int64_t(s) * c_in * h * wdt, c_in, h, wdt, kh, kw, stride, pad,
               ho, wo, cols);
        RowMap out(y.data() + std::int64_t(s) * o * ho * wo, o, std::int64_t(ho) * wo);
        out.noalias() = wmat * cols;
    }
    return y;
}

Tensor conv2d_transpose_val(const Tensor& u, const Tensor& w, int pad) {
    // stride-1 same-shape adjoint == convolution with the flipped/swapped kernel
    if (w.dim(2) != 2 * pad + 1 || w.dim(3) != 2 * pad + 1)
        throw InvalidInputError("conv2d_transpose: kernel/padding must preserve shape");
    return conv2d_val(u, flip_swap(w), 1, pad);
}

Tensor conv2d_wgrad_val(const Tensor& x, const Tensor& g, int kh, int kw, int pad) {
    check4(x, "conv2d_wgrad input");
    check4(g, "conv2d_wgrad outgrad");
    const int n = x.dim(0), c_in = x.dim(1), h = x.dim(2), wdt = x.dim(3);
    const int o = g.dim(1), ho = g.dim(2), wo = g.dim(3);
    if (g.dim(0) != n) throw InvalidInputError("conv2d_wgrad: batch mismatch");

    Tensor dw({o, c_in, kh, kw});
    RowMap dwmat(dw.data(), o, std::int64_t(c_in) * kh * kw);
    dwmat.setZero();
    MatXd cols;
    for (int s = 0; s < n; ++s) {
        im2col(x.data() + std::int64_t(s) * c_in * h * wdt, c_in, h, wdt, kh, kw, 1, pad,
               ho, wo, cols);
        ConstRowMap gm(g.data() + std::int64_t(s) * o * ho * wo, o, std::int64_t(ho) * wo);
        dwmat.noalias() += gm * cols.transpose();
    }
    return dw;
}

Tensor maxpool2d_val(const Tensor& x, int k, int stride) {
    check4(x, "maxpool input");
    const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    const int ho = (h - k) / stride + 1, wo = (w - k) / stride + 1;
    if (ho <= 0 || wo <= 0) throw InvalidInputError("maxpool: output would be empty");
    Tensor y({n, c, ho, wo});
    for (int s = 0; s < n; ++s)
        for (int ch = 0; ch < c; ++ch)
            for (int oy = 0; oy < ho; ++oy)
                for (int ox = 0; ox < wo; ++ox) {
                    double m = -std::numeric_limits<double>::infinity();
                    for (int i = 0; i < k; ++i)
                        for (int j = 0; j < k; ++j)
                            m = std::max(m, x.at4(s, ch, oy * stride + i, ox * stride + j));
                    y.at4(s, ch, oy, ox) = m;
                }
    return y;
}

}  // namespace msgan
