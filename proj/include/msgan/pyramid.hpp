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

#include <array>
#include <vector>

#include "msgan/tensor.hpp"

namespace msgan {

/// Ladder of image sizes trained against, finest (index 0) to coarsest
/// (index N). Sizes shrink by roughly the effective factor `r` per level and
/// the coarsest level lands within one pixel of `min_size_px`.
struct ScaleSchedule {
    std::vector<std::array<int, 2>> sizes;  // (height, width), index 0 = finest
    double r = 0.0;                         // effective per-level factor
    int min_size_px = 0;
    int max_size_px = 0;

    int num_downsamplings() const { return static_cast<int>(sizes.size()) - 1; }  // N
    int num_levels() const { return static_cast<int>(sizes.size()); }
};

/// Images matching a ScaleSchedule level-for-level; values live in [-1, 1],
/// layout (C,H,W).
struct ImagePyramid {
    std::vector<Tensor> levels;
};

/// Derive the ladder for an input of the given size. The input is first
/// scaled so its min dimension does not exceed max_size_px; levels then
/// shrink by r_target (with per-level rounding) until the min dimension
/// reaches min_size_px, and the effective r is re-fit so the ladder lands
/// exactly. Inputs already at or below min_size_px give a single level.
ScaleSchedule build_schedule(int height, int width, int min_size_px, int max_size_px,
                             double r_target);

/// Resample every level directly from the original image (no chaining) with
/// the antialiased bilinear kernel. The image must match sizes[0].
ImagePyramid build_pyramid(const Tensor& image, const ScaleSchedule& schedule);

/// Plain bilinear upsampling to exactly (target_h, target_w).
Tensor upsample(const Tensor& image, int target_h, int target_w);

/// Antialiased (kernel-widened) bilinear downsampling.
Tensor downsample(const Tensor& image, int target_h, int target_w);

/// Bilinear resize dispatching on direction per axis; used for pyramid
/// construction and task-side resizes.
Tensor resize_bilinear(const Tensor& image, int target_h, int target_w, bool antialias);

}  // namespace msgan
