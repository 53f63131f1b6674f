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

#include "msgan/tensor.hpp"

namespace msgan {

// Value-level convolution kernels (im2col + GEMM). The autodiff layer wraps
// the stride-1 same-padding cases; the strided/valid variants also serve the
// feature extractor, which runs inference only.

/// x: (N,C,H,W), w: (O,C,kh,kw), zero padding -> (N,O,Ho,Wo).
Tensor conv2d_val(const Tensor& x, const Tensor& w, int stride, int pad);

/// Adjoint of stride-1 conv2d w.r.t. its input: u: (N,O,H,W) -> (N,C,H,W).
Tensor conv2d_transpose_val(const Tensor& u, const Tensor& w, int pad);

/// Gradient of stride-1 conv2d w.r.t. the kernel: accumulates
/// dW[o,c,i,j] = sum_{n,h,w} x[n,c,h+i-pad,w+j-pad] * g[n,o,h,w].
Tensor conv2d_wgrad_val(const Tensor& x, const Tensor& g, int kh, int kw, int pad);

/// 2-d max pooling, used by the inception feature slice.
Tensor maxpool2d_val(const Tensor& x, int k, int stride);

}  // namespace msgan
