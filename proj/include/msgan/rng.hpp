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
#include <cstdint>
#include <random>

#include "msgan/tensor.hpp"

namespace msgan {

/// Deterministic RNG. Normal draws go through an explicit Box-Muller so the
/// stream does not depend on the standard library's distribution internals;
/// identical seeds give identical training runs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1).
    double uniform() {
        return (eng_() >> 11) * (1.0 / 9007199254740992.0);  // 53-bit mantissa
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t next_u64() { return eng_(); }

    Tensor normal_tensor(std::vector<int> shape, double stddev = 1.0) {
        Tensor t(std::move(shape));
        for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = stddev * normal();
        return t;
    }

    Tensor uniform_tensor(std::vector<int> shape, double lo, double hi) {
        Tensor t(std::move(shape));
        for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = uniform(lo, hi);
        return t;
    }

    /// Stable derived seed (splitmix64 over seed ^ salt); lets each pyramid
    /// scale own an independent stream so a resumed run replays identically.
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace msgan
