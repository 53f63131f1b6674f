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

#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "msgan/tensor.hpp"

namespace msgan::ad {

// Define-by-run reverse-mode autodiff. Backward passes produce gradients that
// are themselves graph variables, so differentiating through a gradient (the
// WGAN-GP penalty term) is just a second backward pass. When grad recording
// is disabled the same entry points degrade to plain value evaluation.

struct Node;
using Var = std::shared_ptr<Node>;
class Grads;

struct Node {
    Tensor value;
    bool requires_grad = false;
    std::vector<Var> parents;
    // Accumulates contributions into the parents' slots of the gradient map.
    // `self` is this node, `gout` the gradient flowing into it.
    std::function<void(const Var& self, const Var& gout, Grads&)> backprop;
};

/// Gradients of one backward pass, kept outside the nodes so independent
/// backward calls can never contaminate each other.
class Grads {
public:
    bool has(const Var& v) const { return map_.count(v.get()) != 0; }
    /// Gradient variable for `v`; throws if none was produced.
    const Var& at(const Var& v) const;
    /// Gradient tensor, or a zero tensor of matching shape if `v` was not reached.
    Tensor value_or_zero(const Var& v) const;
    void accumulate(const Var& v, const Var& g);

private:
    std::unordered_map<Node*, Var> map_;
};

/// Thread-local switch for graph recording (RAII like the usual NoGrad guards).
bool grad_enabled();
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool saved_;
};

Var constant(Tensor value);
Var leaf(Tensor value, bool requires_grad = true);

/// Reverse-mode sweep from a scalar root. With `create_graph` the produced
/// gradients record their own graph and can be differentiated again.
Grads backward(const Var& root, bool create_graph = false);

// ---- elementwise ----
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var neg(const Var& a);
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);
Var vdiv(const Var& a, const Var& b);
Var relu(const Var& a);
Var tanh_(const Var& a);
Var sqrt_(const Var& a);
/// elementwise 1/sqrt(x + eps)
Var rsqrt_eps(const Var& a, double eps);

// ---- reductions and their broadcast inverses ----
Var sum_all(const Var& a);                       // -> shape {1}
Var mean_all(const Var& a);                      // -> shape {1}
Var sum_samples(const Var& a);                   // (N,...) -> {N}
Var channel_sum(const Var& a);                   // (N,C,H,W) -> {C}
Var channel_mean(const Var& a);                  // (N,C,H,W) -> {C}
Var broadcast_all(const Var& s, std::vector<int> shape);       // {1} -> shape
Var broadcast_samples(const Var& s, std::vector<int> shape);   // {N} -> (N,...)
Var channel_expand(const Var& c, std::vector<int> shape);      // {C} -> (N,C,H,W)

// ---- convolution (stride 1, zero padding (k-1)/2, odd k) ----
Var conv2d(const Var& x, const Var& w, int pad);
Var conv2d_transpose(const Var& u, const Var& w, int pad);
Var conv2d_wgrad(const Var& x, const Var& g, int kh, int kw, int pad);

/// Per-sample L2 norm: (N,...) -> {N}. Composition helper.
Var sample_l2_norm(const Var& a);

}  // namespace msgan::ad
