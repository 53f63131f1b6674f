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

#include <cassert>
#include <cstdint>
#include <vector>

namespace msgan {

/// Dense row-major double tensor. Rank is arbitrary but everything in this
/// project is rank 1 (vectors), 2 (matrices), 3 (C,H,W images) or 4 (N,C,H,W
/// batches). Double precision throughout; conversion to 8-bit happens only at
/// the image I/O boundary.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
        data_.assign(static_cast<size_t>(count_(shape_)), 0.0);
    }

    static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

    static Tensor full(std::vector<int> shape, double v) {
        Tensor t(std::move(shape));
        std::fill(t.data_.begin(), t.data_.end(), v);
        return t;
    }

    static Tensor ones(std::vector<int> shape) { return full(std::move(shape), 1.0); }

    static Tensor from_data(std::vector<int> shape, std::vector<double> data) {
        Tensor t;
        t.shape_ = std::move(shape);
        assert(count_(t.shape_) == static_cast<std::int64_t>(data.size()));
        t.data_ = std::move(data);
        return t;
    }

    const std::vector<int>& shape() const { return shape_; }
    int ndim() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
    std::int64_t numel() const { return static_cast<std::int64_t>(data_.size()); }
    bool empty() const { return data_.empty(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& vec() { return data_; }
    const std::vector<double>& vec() const { return data_; }

    double& operator[](std::int64_t i) { return data_[static_cast<size_t>(i)]; }
    double operator[](std::int64_t i) const { return data_[static_cast<size_t>(i)]; }

    /// (N,C,H,W) accessor.
    double& at4(int n, int c, int h, int w) {
        assert(ndim() == 4);
        return data_[static_cast<size_t>(((std::int64_t(n) * shape_[1] + c) * shape_[2] + h) * shape_[3] + w)];
    }
    double at4(int n, int c, int h, int w) const {
        return const_cast<Tensor*>(this)->at4(n, c, h, w);
    }
    /// (C,H,W) accessor.
    double& at3(int c, int h, int w) {
        assert(ndim() == 3);
        return data_[static_cast<size_t>((std::int64_t(c) * shape_[1] + h) * shape_[2] + w)];
    }
    double at3(int c, int h, int w) const {
        return const_cast<Tensor*>(this)->at3(c, h, w);
    }
    /// (rows, cols) accessor.
    double& at2(int r, int c) {
        assert(ndim() == 2);
        return data_[static_cast<size_t>(std::int64_t(r) * shape_[1] + c)];
    }
    double at2(int r, int c) const { return const_cast<Tensor*>(this)->at2(r, c); }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    Tensor reshaped(std::vector<int> shape) const {
        assert(count_(shape) == numel());
        Tensor t;
        t.shape_ = std::move(shape);
        t.data_ = data_;
        return t;
    }

    double l2_norm() const;
    double max_abs() const;
    double sum() const;
    bool all_finite() const;

private:
    static std::int64_t count_(const std::vector<int>& shape) {
        std::int64_t n = 1;
        for (int d : shape) n *= d;
        return shape.empty() ? 0 : n;
    }

    std::vector<int> shape_;
    std::vector<double> data_;
};

/// 64-bit FNV-1a over the raw bytes; used for parameter/image fingerprints.
std::uint64_t fnv1a64(const void* bytes, std::size_t n);
std::uint64_t tensor_fingerprint(const Tensor& t);

}  // namespace msgan
