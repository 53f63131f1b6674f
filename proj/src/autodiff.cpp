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

#include "msgan/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "msgan/common.hpp"
#include "msgan/conv_kernels.hpp"

namespace msgan::ad {

namespace {

thread_local bool g_grad_enabled = true;

Var make_node(Tensor value, std::vector<Var> parents,
              std::function<void(const Var&, const Var&, Grads&)> backprop) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    if (grad_enabled()) {
        bool needs = false;
        for (const auto& p : parents)
            if (p && p->requires_grad) needs = true;
        if (needs) {
            n->requires_grad = true;
            n->parents = std::move(parents);
            n->backprop = std::move(backprop);
        }
    }
    return n;
}

void check_same_shape(const Var& a, const Var& b, const char* op) {
    if (!a->value.same_shape(b->value))
        throw InvalidInputError(std::string(op) + ": shape mismatch");
}

}  // namespace

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : saved_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = saved_; }

namespace {
// Scoped re-enable used inside backward(create_graph=true).
class GradModeGuard {
public:
    explicit GradModeGuard(bool on) : saved_(g_grad_enabled) { g_grad_enabled = on; }
    ~GradModeGuard() { g_grad_enabled = saved_; }

private:
    bool saved_;
};
}  // namespace

const Var& Grads::at(const Var& v) const {
    auto it = map_.find(v.get());
    if (it == map_.end()) throw InvalidInputError("Grads::at: no gradient for this variable");
    return it->second;
}

Tensor Grads::value_or_zero(const Var& v) const {
    auto it = map_.find(v.get());
    if (it == map_.end()) return Tensor::zeros(v->value.shape());
    return it->second->value;
}

void Grads::accumulate(const Var& v, const Var& g) {
    auto it = map_.find(v.get());
    if (it == map_.end())
        map_.emplace(v.get(), g);
    else
        it->second = add(it->second, g);
}

Var constant(Tensor value) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->requires_grad = false;
    return n;
}

Var leaf(Tensor value, bool requires_grad) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->requires_grad = requires_grad;
    return n;
}

Grads backward(const Var& root, bool create_graph) {
    if (root->value.numel() != 1)
        throw InvalidInputError("backward: root must be a scalar");
    Grads grads;
    if (!root->requires_grad) return grads;

    // iterative post-order topological sort over grad-requiring nodes
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    std::unordered_map<Node*, Var> keep;  // Node* -> shared_ptr, for traversal by raw ptr
    std::vector<std::pair<Var, size_t>> stack;
    stack.emplace_back(root, 0);
    visited.insert(root.get());
    keep.emplace(root.get(), root);
    while (!stack.empty()) {
        auto& [node, idx] = stack.back();
        if (idx < node->parents.size()) {
            Var p = node->parents[idx++];
            if (p && p->requires_grad && !visited.count(p.get())) {
                visited.insert(p.get());
                keep.emplace(p.get(), p);
                stack.emplace_back(std::move(p), 0);
            }
        } else {
            order.push_back(node.get());
            stack.pop_back();
        }
    }

    GradModeGuard mode(create_graph);
    grads.accumulate(root, constant(Tensor::ones(root->value.shape())));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        const Var& self = keep.at(n);
        if (!n->backprop || !grads.has(self)) continue;
        n->backprop(self, grads.at(self), grads);
    }
    return grads;
}

// ---------------------------------------------------------------- elementwise

Var add(const Var& a, const Var& b) {
    check_same_shape(a, b, "add");
    Tensor out = a->value;
    const double* bp = b->value.data();
    double* op = out.data();
    for (std::int64_t i = 0; i < out.numel(); ++i) op[i] += bp[i];
    return make_node(std::move(out), {a, b},
                     [a, b](const Var&, const Var& g, Grads& gm) {
                         if (a->requires_grad) gm.accumulate(a, g);
                         if (b->requires_grad) gm.accumulate(b, g);
                     });
}

Var sub(const Var& a, const Var& b) {
    check_same_shape(a, b, "sub");
    Tensor out = a->value;
    const double* bp = b->value.data();
    double* op = out.data();
    for (std::int64_t i = 0; i < out.numel(); ++i) op[i] -= bp[i];
    return make_node(std::move(out), {a, b},
                     [a, b](const Var&, const Var& g, Grads& gm) {
                         if (a->requires_grad) gm.accumulate(a, g);
                         if (b->requires_grad) gm.accumulate(b, neg(g));
                     });
}

Var mul(const Var& a, const Var& b) {
    check_same_shape(a, b, "mul");
    Tensor out = a->value;
    const double* bp = b->value.data();
    double* op = out.data();
    for (std::int64_t i = 0; i < out.numel(); ++i) op[i] *= bp[i];
    return make_node(std::move(out), {a, b},
                     [a, b](const Var&, const Var& g, Grads& gm) {
                         if (a->requires_grad) gm.accumulate(a, mul(g, b));
                         if (b->requires_grad) gm.accumulate(b, mul(g, a));
                     });
}

Var neg(const Var& a) { return scale(a, -1.0); }

Var scale(const Var& a, double s) {
    Tensor out = a->value;
    double* op = out.data();
    for (std::int64_t i = 0; i < out.numel(); ++i) op[i] *= s;
    return make_node(std::move(out), {a},
                     [a, s](const Var&, const Var& g, Grads& gm) {
                         if (a->requires_grad) gm.accumulate(a, scale(g, s));
                     });
}

Var add_scalar(const Var& a, double s) {
    Tensor out = a->value;
    double* op = out.data();
    for (std::int64_t i = 0; i < out.numel(); ++i) op[i] += s;
    return make_node(std::move(out), {a},
                     [a](const Var&, const Var& g, Grads& gm) {
                         if (a->requires_grad) gm.accumulate(a, g);
                     });
}

Var vdiv(const Var& a, const Var& b) {
    check_same_shape(a, b, "vdiv");
    Tensor out = a->value;
    const double* bp = b->value.data();
    double* op = out.data();
    for (std::int64_t i = 0; i < out.numel(); ++i) op[i] /= bp[i];
    return make_node(std::move(out), {a, b},
                     [a, b](const Var& self, const Var& g, Grads& gm) {
                         if (a->requires_grad) gm.accumulate(a, vdiv(g, b));
                         if (b->requires_grad)
                             gm.accumulate(b, neg(vdiv(mul(g, self), b)));
                     });
}

Var relu(const Var& a) {
    Tensor out = a->value;
    Tensor mask(out.shape());
    double* op = out.data();
    double* mp = mask.data();
    for (std::int64_t i = 0; i < out.numel(); ++i) {
        mp[i] = op[i] > 0.0 ? 1.0 : 0.0;
        op[i] = op[i] > 0.0 ? op[i] : 0.0;
    }
    // the 0/1 mask is a constant of differentiation (ReLU'' = 0 a.e.)
    Var mask_c = constant(std::move(mask));
    return make_node(std::move(out), {a},
                     [a, mask_c](const Var&, const Var& g, Grads& gm) {
                         if (a->requires_grad) gm.accumulate(a, mul(g, mask_c));
                     });
}

Var tanh_(const Var& a) {
    Tensor out = a->value;
    double* op = out.data();
    for (std::int64_t i = 0; i < out.numel(); ++i) op[i] = std::tanh(op[i]);
    return make_node(std::move(out), {a},
                     [a](const Var& self, const Var& g, Grads& gm) {
                         if (!a->requires_grad) return;
                         // d tanh = 1 - y^2, expressed on the output variable
                         Var one_minus = add_scalar(neg(mul(self, self)), 1.0);
                         gm.accumulate(a, mul(g, one_minus));
                     });
}

Var sqrt_(const Var& a) {
    Tensor out = a->value;
    double* op = out.data();
    for (std::int64_t i = 0; i < out.numel(); ++i) op[i] = std::sqrt(op[i]);
    return make_node(std::move(out), {a},
                     [a](const Var& self, const Var& g, Grads& gm) {
                         if (!a->requires_grad) return;
                         gm.accumulate(a, vdiv(scale(g, 0.5), self));
                     });
}

Var rsqrt_eps(const Var& a, double eps) {
    Tensor out = a->value;
    double* op = out.data();
    for (std::int64_t i = 0; i < out.numel(); ++i) op[i] = 1.0 / std::sqrt(op[i] + eps);
    return make_node(std::move(out), {a},
                     [a](const Var& self, const Var& g, Grads& gm) {
                         if (!a->requires_grad) return;
                         // d/dx (x+eps)^-1/2 = -1/2 y^3
                         Var y3 = mul(mul(self, self), self);
                         gm.accumulate(a, scale(mul(g, y3), -0.5));
                     });
}

// ---------------------------------------------------------------- reductions

Var sum_all(const Var& a) {
    Tensor out({1});
    out[0] = a->value.sum();
    return make_node(std::move(out), {a},
                     [a](const Var&, const Var& g, Grads& gm) {
                         if (a->requires_grad)
                             gm.accumulate(a, broadcast_all(g, a->value.shape()));
                     });
}

Var mean_all(const Var& a) { return scale(sum_all(a), 1.0 / double(a->value.numel())); }

Var sum_samples(const Var& a) {
    const int n = a->value.dim(0);
    const std::int64_t per = a->value.numel() / n;
    Tensor out({n});
    const double* ap = a->value.data();
    for (int s = 0; s < n; ++s) {
        double acc = 0.0;
        for (std::int64_t i = 0; i < per; ++i) acc += ap[s * per + i];
        out[s] = acc;
    }
    return make_node(std::move(out), {a},
                     [a](const Var&, const Var& g, Grads& gm) {
                         if (a->requires_grad)
                             gm.accumulate(a, broadcast_samples(g, a->value.shape()));
                     });
}

Var channel_sum(const Var& a) {
    if (a->value.ndim() != 4) throw InvalidInputError("channel_sum: expected (N,C,H,W)");
    const int n = a->value.dim(0), c = a->value.dim(1);
    const std::int64_t hw = std::int64_t(a->value.dim(2)) * a->value.dim(3);
    Tensor out({c});
    const double* ap = a->value.data();
    for (int s = 0; s < n; ++s)
        for (int ch = 0; ch < c; ++ch) {
            double acc = 0.0;
            const double* p = ap + (std::int64_t(s) * c + ch) * hw;
            for (std::int64_t i = 0; i < hw; ++i) acc += p[i];
            out[ch] += acc;
        }
    return make_node(std::move(out), {a},
                     [a](const Var&, const Var& g, Grads& gm) {
                         if (a->requires_grad)
                             gm.accumulate(a, channel_expand(g, a->value.shape()));
                     });
}

Var channel_mean(const Var& a) {
    const std::int64_t per = a->value.numel() / a->value.dim(1);
    return scale(channel_sum(a), 1.0 / double(per));
}

Var broadcast_all(const Var& s, std::vector<int> shape) {
    if (s->value.numel() != 1) throw InvalidInputError("broadcast_all: source must be scalar");
    Tensor out = Tensor::full(shape, s->value[0]);
    return make_node(std::move(out), {s},
                     [s](const Var&, const Var& g, Grads& gm) {
                         if (s->requires_grad) gm.accumulate(s, sum_all(g));
                     });
}

Var broadcast_samples(const Var& s, std::vector<int> shape) {
    const int n = shape[0];
    if (s->value.numel() != n) throw InvalidInputError("broadcast_samples: size mismatch");
    Tensor out(shape);
    const std::int64_t per = out.numel() / n;
    double* op = out.data();
    for (int i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < per; ++j) op[i * per + j] = s->value[i];
    return make_node(std::move(out), {s},
                     [s](const Var&, const Var& g, Grads& gm) {
                         if (s->requires_grad) gm.accumulate(s, sum_samples(g));
                     });
}

Var channel_expand(const Var& c, std::vector<int> shape) {
    if (shape.size() != 4 || c->value.numel() != shape[1])
        throw InvalidInputError("channel_expand: size mismatch");
    Tensor out(shape);
    const int n = shape[0], ch = shape[1];
    const std::int64_t hw = std::int64_t(shape[2]) * shape[3];
    double* op = out.data();
    for (int s = 0; s < n; ++s)
        for (int k = 0; k < ch; ++k) {
            double v = c->value[k];
            double* p = op + (std::int64_t(s) * ch + k) * hw;
            for (std::int64_t i = 0; i < hw; ++i) p[i] = v;
        }
    return make_node(std::move(out), {c},
                     [c](const Var&, const Var& g, Grads& gm) {
                         if (c->requires_grad) gm.accumulate(c, channel_sum(g));
                     });
}

// -------------------------------------------------------------- convolutions

Var conv2d(const Var& x, const Var& w, int pad) {
    Tensor out = conv2d_val(x->value, w->value, 1, pad);
    const int kh = w->value.dim(2), kw = w->value.dim(3);
    return make_node(std::move(out), {x, w},
                     [x, w, kh, kw, pad](const Var&, const Var& g, Grads& gm) {
                         if (x->requires_grad) gm.accumulate(x, conv2d_transpose(g, w, pad));
                         if (w->requires_grad)
                             gm.accumulate(w, conv2d_wgrad(x, g, kh, kw, pad));
                     });
}

Var conv2d_transpose(const Var& u, const Var& w, int pad) {
    Tensor out = conv2d_transpose_val(u->value, w->value, pad);
    const int kh = w->value.dim(2), kw = w->value.dim(3);
    return make_node(std::move(out), {u, w},
                     [u, w, kh, kw, pad](const Var&, const Var& g, Grads& gm) {
                         if (u->requires_grad) gm.accumulate(u, conv2d(g, w, pad));
                         if (w->requires_grad)
                             gm.accumulate(w, conv2d_wgrad(g, u, kh, kw, pad));
                     });
}

Var conv2d_wgrad(const Var& x, const Var& g, int kh, int kw, int pad) {
    Tensor out = conv2d_wgrad_val(x->value, g->value, kh, kw, pad);
    return make_node(std::move(out), {x, g},
                     [x, g, pad](const Var&, const Var& gout, Grads& gm) {
                         // gout has kernel shape; it acts as a conv kernel on both paths
                         if (x->requires_grad) gm.accumulate(x, conv2d_transpose(g, gout, pad));
                         if (g->requires_grad) gm.accumulate(g, conv2d(x, gout, pad));
                     });
}

Var sample_l2_norm(const Var& a) { return sqrt_(sum_samples(mul(a, a))); }

}  // namespace msgan::ad
