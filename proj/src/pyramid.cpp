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

#include "msgan/pyramid.hpp"

#include <algorithm>
#include <cmath>

#include "msgan/common.hpp"

namespace msgan {

namespace {

int round_px(double v) { return static_cast<int>(std::lround(v)); }

// Precomputed taps for one axis of a separable triangle-filter resample with
// half-pixel centers. For downsampling the kernel support widens by the
// inverse scale so high frequencies are averaged out; weights are
// renormalized, which keeps constants exact and makes same-size resampling
// the identity.
struct AxisTaps {
    std::vector<int> idx;
    std::vector<double> wgt;
    std::vector<int> offsets;  // per destination sample, into idx/wgt
};

AxisTaps make_taps(int n_src, int n_dst, bool antialias) {
    AxisTaps taps;
    taps.offsets.assign(n_dst + 1, 0);
    const double scale = double(n_src) / double(n_dst);
    const double support = (antialias && scale > 1.0) ? scale : 1.0;
    for (int d = 0; d < n_dst; ++d) {
        const double center = (d + 0.5) * scale - 0.5;
        const int lo = std::max(0, int(std::ceil(center - support)));
        const int hi = std::min(n_src - 1, int(std::floor(center + support)));
        double total = 0.0;
        for (int s = lo; s <= hi; ++s) {
            const double t = std::fabs(s - center) / support;
            const double w = t < 1.0 ? 1.0 - t : 0.0;
            if (w > 0.0) {
                taps.idx.push_back(s);
                taps.wgt.push_back(w);
                total += w;
            }
        }
        if (total == 0.0) {  // degenerate: nearest source sample
            taps.idx.push_back(std::clamp(int(std::lround(center)), 0, n_src - 1));
            taps.wgt.push_back(1.0);
            total = 1.0;
        }
        for (size_t k = taps.offsets[d]; k < taps.wgt.size(); ++k) taps.wgt[k] /= total;
        taps.offsets[d + 1] = static_cast<int>(taps.idx.size());
    }
    return taps;
}

void resample_axis(const AxisTaps& taps, const double* src, double* dst, int n_dst,
                   std::int64_t stride_src, std::int64_t stride_dst) {
    for (int d = 0; d < n_dst; ++d) {
        double acc = 0.0;
        for (int k = taps.offsets[d]; k < taps.offsets[d + 1]; ++k)
            acc += taps.wgt[k] * src[taps.idx[k] * stride_src];
        dst[d * stride_dst] = acc;
    }
}

}  // namespace

Tensor resize_bilinear(const Tensor& image, int target_h, int target_w, bool antialias) {
    if (image.ndim() != 3) throw InvalidInputError("resize: expected (C,H,W) image");
    const int c = image.dim(0), h = image.dim(1), w = image.dim(2);
    if (target_h <= 0 || target_w <= 0) throw InvalidInputError("resize: non-positive target");
    if (h == target_h && w == target_w) return image;

    // vertical pass: (C,H,W) -> (C,target_h,W)
    const AxisTaps vtaps = make_taps(h, target_h, antialias);
    Tensor tmp({c, target_h, w});
    for (int ch = 0; ch < c; ++ch)
        for (int x = 0; x < w; ++x)
            resample_axis(vtaps, image.data() + std::int64_t(ch) * h * w + x,
                          tmp.data() + std::int64_t(ch) * target_h * w + x, target_h, w, w);
    // horizontal pass: (C,target_h,W) -> (C,target_h,target_w)
    const AxisTaps htaps = make_taps(w, target_w, antialias);
    Tensor out({c, target_h, target_w});
    for (int ch = 0; ch < c; ++ch)
        for (int y = 0; y < target_h; ++y)
            resample_axis(htaps, tmp.data() + (std::int64_t(ch) * target_h + y) * w,
                          out.data() + (std::int64_t(ch) * target_h + y) * target_w,
                          target_w, 1, 1);
    return out;
}

ScaleSchedule build_schedule(int height, int width, int min_size_px, int max_size_px,
                             double r_target) {
    if (height <= 0 || width <= 0) throw InvalidInputError("build_schedule: non-positive dims");
    if (min_size_px < 8) throw InvalidInputError("build_schedule: min_size_px must be >= 8");
    if (max_size_px < min_size_px)
        throw InvalidInputError("build_schedule: max_size_px < min_size_px");
    if (r_target <= 1.0) throw InvalidInputError("build_schedule: r_target must exceed 1");

    // cap the min dimension at max_size_px, preserving aspect
    double h0 = height, w0 = width;
    const int min_dim_in = std::min(height, width);
    if (min_dim_in > max_size_px) {
        const double s = double(max_size_px) / double(min_dim_in);
        h0 = height * s;
        w0 = width * s;
    }
    const int h0i = round_px(h0), w0i = round_px(w0);

    ScaleSchedule sched;
    sched.min_size_px = min_size_px;
    sched.max_size_px = max_size_px;

    const double d0 = std::min(h0, w0);
    // ladder with per-level rounding: N = first level whose min dim reaches
    // min_size_px
    int n = 0;
    while (round_px(d0 / std::pow(r_target, n)) > min_size_px) ++n;

    if (n == 0) {
        sched.sizes.push_back({h0i, w0i});
        sched.r = r_target;
        return sched;
    }

    // re-fit r so level N lands on min_size_px exactly (up to rounding)
    sched.r = std::pow(d0 / double(min_size_px), 1.0 / double(n));
    for (int lvl = 0; lvl <= n; ++lvl) {
        const double f = std::pow(sched.r, lvl);
        sched.sizes.push_back({std::max(1, round_px(h0 / f)), std::max(1, round_px(w0 / f))});
    }
    sched.sizes.front() = {h0i, w0i};
    return sched;
}

ImagePyramid build_pyramid(const Tensor& image, const ScaleSchedule& schedule) {
    if (image.ndim() != 3) throw InvalidInputError("build_pyramid: expected (C,H,W) image");
    if (image.dim(1) != schedule.sizes[0][0] || image.dim(2) != schedule.sizes[0][1])
        throw InvalidInputError("build_pyramid: image does not match schedule level 0");
    ImagePyramid pyr;
    pyr.levels.reserve(schedule.sizes.size());
    for (const auto& hw : schedule.sizes) {
        Tensor lvl = resize_bilinear(image, hw[0], hw[1], /*antialias=*/true);
        for (std::int64_t i = 0; i < lvl.numel(); ++i) lvl[i] = std::clamp(lvl[i], -1.0, 1.0);
        pyr.levels.push_back(std::move(lvl));
    }
    return pyr;
}

Tensor upsample(const Tensor& image, int target_h, int target_w) {
    if (image.ndim() != 3) throw InvalidInputError("upsample: expected (C,H,W) image");
    if (target_h < image.dim(1) || target_w < image.dim(2))
        throw InvalidInputError("upsample: target smaller than source");
    return resize_bilinear(image, target_h, target_w, /*antialias=*/false);
}

Tensor downsample(const Tensor& image, int target_h, int target_w) {
    if (image.ndim() != 3) throw InvalidInputError("downsample: expected (C,H,W) image");
    return resize_bilinear(image, target_h, target_w, /*antialias=*/true);
}

}  // namespace msgan
