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

#include <Eigen/Core>

#include "msgan/tensor.hpp"

namespace msgan {

/// Abstract linear map with adjoint, the operand of power iteration. Conv
/// layers enter through their unrolled operator form rather than a reshaped
/// kernel matrix.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;
    virtual std::int64_t domain_size() const = 0;
    virtual std::int64_t range_size() const = 0;
    virtual void apply(const double* x, double* y) const = 0;          // y = A x
    virtual void apply_adjoint(const double* y, double* x) const = 0;  // x = A^T y
};

class DenseOperator : public LinearOperator {
public:
    explicit DenseOperator(Eigen::MatrixXd m) : m_(std::move(m)) {}
    std::int64_t domain_size() const override { return m_.cols(); }
    std::int64_t range_size() const override { return m_.rows(); }
    void apply(const double* x, double* y) const override;
    void apply_adjoint(const double* y, double* x) const override;

private:
    Eigen::MatrixXd m_;
};

/// Stride-1 zero-padded convolution over a fixed spatial size.
class ConvOperator : public LinearOperator {
public:
    ConvOperator(Tensor kernel, int in_h, int in_w, int pad);
    std::int64_t domain_size() const override;
    std::int64_t range_size() const override;
    void apply(const double* x, double* y) const override;
    void apply_adjoint(const double* y, double* x) const override;

private:
    Tensor kernel_;
    int in_h_, in_w_, pad_;
};

/// Largest singular value by power iteration on A^T A. Stops when the
/// relative change drops below tol or iters are exhausted. `warm_start`, when
/// non-empty, seeds the iteration and receives the final right vector;
/// otherwise a fixed-seed start keeps results reproducible.
double spectral_norm(const LinearOperator& op, int iters, double tol,
                     Tensor* warm_start = nullptr);

/// Materialize the operator as a dense matrix (test support for small sizes).
Eigen::MatrixXd materialize(const LinearOperator& op);

}  // namespace msgan
