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
#include <functional>

#include "msgan/rng.hpp"
#include "msgan/tensor.hpp"

namespace msgan::test {

inline double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

/// Central finite differences of a scalar function at x.
inline Tensor finite_diff(const std::function<double(const Tensor&)>& f, const Tensor& x,
                          double h = 1e-5) {
    Tensor g(x.shape());
    Tensor xp = x;
    for (std::int64_t i = 0; i < x.numel(); ++i) {
        const double saved = xp[i];
        xp[i] = saved + h;
        const double fp = f(xp);
        xp[i] = saved - h;
        const double fm = f(xp);
        xp[i] = saved;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
    double m = 0.0;
    for (std::int64_t i = 0; i < a.numel(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

inline double max_rel_diff(const Tensor& a, const Tensor& b, double floor = 1e-8) {
    double m = 0.0;
    for (std::int64_t i = 0; i < a.numel(); ++i)
        m = std::max(m, std::fabs(a[i] - b[i]) /
                            std::max({std::fabs(a[i]), std::fabs(b[i]), floor}));
    return m;
}

}  // namespace msgan::test
